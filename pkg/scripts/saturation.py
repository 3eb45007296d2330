#!/usr/bin/env python
# normalized against clipped weights for a smooth target (r = 2), where the
# normalized-weight bound saturates and the clipped one does not. Both schemes
# run on the clipped-weight lambda schedule, so only the weights differ.
from SPyShift.Experiment import Experiment, write_results, plot_rates, estimate_rates
from SPyShift.Problem import theoretical_exponent
from SPyShift.defaults import saturation as inputs

inputs['experiment']['results'] = 'saturation.csv'
inputs['experiment']['plot'] = 'saturation.svg'
e = Experiment(inputs)

records = e.create()
write_results(records, e.resultsPath)
plot_rates(records, e.plotPath, exponent=e.exponent)

p = e.problem
normalized = theoretical_exponent('thm1', p.r, p.beta, alpha=e.shift.alpha)
for scheme, report in estimate_rates(records).items():
    print('{:>12s}: exponent {:.3f}'.format(scheme, report.exponent))
print('theory: clipped {:.3f}, normalized {:.3f}'.format(e.exponent, normalized))
