documented_keywords = {
    'problem': {'beta': 'Capacity exponent, eigenvalues mu_k = k**(-1/beta), 0 < beta <= 1',
                'r': 'Regularity of the target, f_rho = L_K**r u_rho, r >= 1/2',
                'm': 'Number of trigonometric eigenfunctions kept in the kernel',
                'noise': 'Half-width M of the uniform label noise',
                'seed': 'Master seed; $SPECTRAL_SHIFT_SEED overrides it'},
    'shift': {'family': "One of 'none', 'bounded', 'log'",
              'a': "Amplitude of the training density 1 + a*sin(2 pi x), 0 < a < 1 ('bounded' only)",
              'alpha': 'Moment condition exponent, 0 <= alpha <= 1',
              'C': 'Moment condition constant C > 0',
              'sigma': 'Moment condition constant sigma > 0'},
    'filter': {'kind': "One of 'tikhonov', 'landweber', 'cutoff'",
               't': 'Landweber iterations; None takes t = round(1/lambda) from the schedule'},
    'experiment': {'scheme': "One of (or a list of) 'unweighted', 'exact', 'normalized', 'clipped'",
                   'theorem': "Lambda schedule, one of 'thm1', 'cor1', 'thm3', 'thm4'",
                   'n_grid': 'Strictly increasing list of training sample sizes',
                   'trials': 'Number of independent training sets per sample size (>= 1)',
                   'epsilon': 'Slack epsilon of the thm3 and clipping schedules, 0 < epsilon < r/(2r+beta)',
                   'timing': 'If True, write wall-clock milliseconds (breaks byte-for-byte reproducibility)',
                   'results': 'Path of the results CSV (None for $SPYSHIFTDATA/outputs)',
                   'plot': 'Path of the rate plot SVG (None for $SPYSHIFTDATA/plots)'},
}

# the allowed values for the keywords that name a choice
documented_choices = {
    ('shift', 'family'): ('none', 'bounded', 'log'),
    ('filter', 'kind'): ('tikhonov', 'landweber', 'cutoff'),
    ('experiment', 'scheme'): ('unweighted', 'exact', 'normalized', 'clipped'),
    ('experiment', 'theorem'): ('thm1', 'cor1', 'thm3', 'thm4'),
}
