#!/usr/bin/env python
# clipped importance weights, for a training density that vanishes at x = 0
from SPyShift.Experiment import Experiment, write_results, plot_rates, estimate_rates
from SPyShift.defaults import clipped as inputs

inputs['experiment']['scheme'] = ['unweighted', 'exact', 'clipped']
inputs['experiment']['results'] = 'clipped.csv'
inputs['experiment']['plot'] = 'clipped.svg'
e = Experiment(inputs)

records = e.create()
write_results(records, e.resultsPath)
plot_rates(records, e.plotPath, exponent=e.exponent)
for scheme, report in estimate_rates(records).items():
    print('{:>12s}: exponent {:.3f} (theory {:.3f})'.format(scheme, report.exponent, e.exponent))
