"""SPyShift: weighted spectral algorithms for kernel regression under covariate shift."""
