"""The spyshift command line: fit, predict, simulate, rates, diagnose, filters-check, plot.

Exit codes are 0 on success, 1 on a contract violation (or a usage error),
2 on a numeric error and 3 when a diagnostic or acceptance check fails."""
import os
import sys
import json
import logging
import argparse

import numpy as np
import astropy.io.ascii
import astropy.table

from . import Diagnostics
from . import Estimator
from . import Experiment
from . import Filter
from . import Problem
from . import Shift
from .defaults import inputs as default
from .errors import SPyShiftError, ContractViolation, AcceptanceFailure
from .settings import log_file_handler, seed_override, dirs

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)


def readInputs(path):
    if path is None:
        return Experiment.checkInputs(default)
    return Experiment.load_inputs(path)


def readColumns(path, required, optional=()):
    """Read named float columns from a CSV file."""
    table = astropy.io.ascii.read(path, format='csv')
    missing = [c for c in required if c not in table.colnames]
    if missing:
        raise ContractViolation('{} is missing the columns {}'.format(path, missing))
    columns = {}
    for c in list(required) + list(optional):
        if c not in table.colnames:
            continue
        try:
            columns[c] = np.array(table[c], dtype=float)
        except (TypeError, ValueError):
            raise ContractViolation('{} column {} is not numeric'.format(path, c))
    return columns


def fit(args):
    inputs = readInputs(args.config)
    kw = inputs['problem']
    shift = Shift.makeShift(**inputs['shift'])
    problem = Problem.make_problem(kw['beta'], kw['r'], kw['m'], kw['noise'], shift=shift,
                                   seed=seed_override(kw['seed']))

    columns = readColumns(args.data, ('x', 'y'), ('w',))
    w = columns.get('w')
    if w is None:
        w = shift.density_ratio(columns['x'])
    data = Estimator.Dataset(columns['x'], columns['y'], w)

    experiment = inputs['experiment']
    scheme = args.scheme or experiment['scheme']
    if isinstance(scheme, (list, tuple)):
        if len(scheme) != 1:
            raise ContractViolation('fit needs a single weighting scheme, got {}'.format(scheme))
        scheme = scheme[0]
    scheme = scheme.lower()
    D_n = args.clip
    if scheme == 'clipped' and D_n is None:
        D_n = Shift.clipping_threshold(data.n, problem.r, shift.alpha, experiment['epsilon'], problem.beta)

    lam = args.lam
    if lam is None:
        lam = Problem.lambda_schedule(experiment['theorem'], data.n, problem.r, problem.beta,
                                      alpha=shift.alpha, epsilon=experiment['epsilon'])
    if inputs['filter']['kind'].lower() == 'landweber':
        t = inputs['filter']['t']
        if t is None:
            t, lam = Problem.landweber_steps(lam)
        else:
            lam = 1.0 / t
        filter = Filter.Landweber(t=t)
    else:
        filter = Filter.makeFilter(**inputs['filter'])

    est = Estimator.fit(data, problem.kernel, filter, lam, Shift.makeScheme(scheme, D_n=D_n))
    model = args.model or os.path.join(dirs['models'], 'model.json')
    Estimator.save_model(est, model)
    print(json.dumps(dict(model=model, n=data.n, filter=est.filter, scheme=est.scheme,
                          lam=est.lambda_effective)))
    return 0


def predict(args):
    est = Estimator.load_model(args.model)
    if args.points is not None:
        x = readColumns(args.points, ('x',))['x']
    elif args.x:
        x = np.array(args.x, dtype=float)
    else:
        raise ContractViolation('predict needs --x or --points')
    y = est.predict(x)
    if args.out is not None:
        astropy.table.Table(data=[x, y], names=('x', 'prediction')).write(
            args.out, format='ascii.csv', overwrite=True, formats={'x': '%.17g', 'prediction': '%.17g'})
    else:
        for a, b in zip(x, y):
            print('{!r},{!r}'.format(float(a), float(b)))
    return 0


def simulate(args):
    inputs = readInputs(args.config)
    if args.results is not None:
        inputs['experiment']['results'] = args.results
    if args.plot is not None:
        inputs['experiment']['plot'] = args.plot
    experiment = Experiment.Experiment(inputs)
    records = experiment.create(jobs=args.jobs)
    Experiment.write_results(records, experiment.resultsPath)
    if inputs['experiment']['plot'] is not None:
        Experiment.plot_rates(records, experiment.plotPath, exponent=experiment.exponent)

    summary = dict(results=experiment.resultsPath, rows=len(records),
                   failed=sum(r.status != 'ok' for r in records), theory=experiment.exponent)
    if len(experiment.n_grid) >= 3:
        try:
            summary['rates'] = {k: v.summary for k, v in Experiment.estimate_rates(records).items()}
        except SPyShiftError as e:
            logger.warning('could not estimate the rates: {}'.format(e))
    print(json.dumps(summary, indent=1))
    return 0


def rates(args):
    records = Experiment.read_results(args.input)
    theory = Problem.theoretical_exponent(args.theorem, args.r, args.beta, alpha=args.alpha, epsilon=args.epsilon)
    if args.scheme is not None:
        reports = {args.scheme: Experiment.estimate_rate(records, args.scheme)}
    else:
        reports = Experiment.estimate_rates(records)
    if not reports:
        raise ContractViolation('{} holds no successful records'.format(args.input))

    output = {}
    for scheme, report in reports.items():
        output[scheme] = dict(slope=report.slope, stderr=report.stderr, exponent=report.exponent,
                              theory=theory, n_grid=report.n_grid)
    print(json.dumps(output, indent=1))
    if args.tolerance is not None:
        bad = {k: v['exponent'] for k, v in output.items() if abs(v['exponent'] - theory) > args.tolerance}
        if bad:
            raise AcceptanceFailure('exponents {} are further than {} from {}'.format(bad, args.tolerance, theory))
    return 0


def diagnose(args):
    rows = Diagnostics.run_diagnostics(args.suite)
    names = ('suite', 'case', 'parameter', 'lhs', 'rhs', 'passed')
    table = astropy.table.Table(rows=[[r[k] for k in names] for r in rows], names=names)
    if args.out is not None:
        table.write(args.out, format='ascii.csv', overwrite=True,
                    formats={'parameter': '%.17g', 'lhs': '%.17g', 'rhs': '%.17g'})
    summary = {}
    for r in rows:
        cases, failed = summary.get(r['suite'], (0, 0))
        summary[r['suite']] = (cases + 1, failed + (not r['passed']))
    for suite, (cases, failed) in summary.items():
        print('{:>20s} {:>6d} cases {:>6d} failed'.format(suite, cases, failed))
    failed = sum(f for c, f in summary.values())
    if failed:
        raise AcceptanceFailure('{} diagnostic cases failed'.format(failed))
    return 0


def filtersCheck(args):
    kinds = ['tikhonov', 'landweber', 'cutoff'] if args.kind == 'all' else [args.kind]
    lambdas = np.logspace(-3, 0, args.nlambda)
    u = np.linspace(0.0, 1.0, args.nu)
    failed = []
    for kind in kinds:
        filter = Filter.Landweber(t=1) if kind == 'landweber' else Filter.makeFilter(kind=kind)
        report = Filter.verify_filter_conditions(filter, lambdas, u, args.nus)
        print('{:>12s} worst ratio {:.12f} {}'.format(kind, report['worst'],
                                                       {True: 'passed', False: 'FAILED'}[report['passed']]))
        for note in report['notes']:
            print('{:>12s} {}'.format('', note))
        if not report['passed']:
            failed.append(kind)
    if failed:
        raise AcceptanceFailure('the filter conditions failed for {}'.format(failed))
    return 0


def plot(args):
    records = Experiment.read_results(args.input)
    exponent = None
    if args.theorem is not None:
        exponent = Problem.theoretical_exponent(args.theorem, args.r, args.beta, alpha=args.alpha,
                                                epsilon=args.epsilon)
    Experiment.plot_rates(records, args.out, exponent=exponent)
    print(args.out)
    return 0


def addTheory(parser, required):
    parser.add_argument('--theorem', required=required, choices=Problem.schedules)
    parser.add_argument('--r', type=float, default=1.0)
    parser.add_argument('--beta', type=float, default=0.5)
    parser.add_argument('--alpha', type=float, default=1.0)
    parser.add_argument('--epsilon', type=float, default=None)


def makeParser():
    parser = argparse.ArgumentParser(prog='spyshift',
                                     description='Weighted spectral algorithms under covariate shift.')
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('fit', help='fit a model to a CSV dataset (columns x, y and optionally w)')
    p.add_argument('--data', required=True)
    p.add_argument('--model', default=None)
    p.add_argument('--config', default=None)
    p.add_argument('--lambda', dest='lam', type=float, default=None)
    p.add_argument('--scheme', default=None, choices=('unweighted', 'exact', 'normalized', 'clipped'))
    p.add_argument('--clip', type=float, default=None)
    p.set_defaults(func=fit)

    p = sub.add_parser('predict', help='evaluate a saved model')
    p.add_argument('--model', required=True)
    p.add_argument('--x', type=float, nargs='+', default=None)
    p.add_argument('--points', default=None)
    p.add_argument('--out', default=None)
    p.set_defaults(func=predict)

    p = sub.add_parser('simulate', help='run a sample-size sweep from an experiment document')
    p.add_argument('--config', required=True)
    p.add_argument('--jobs', type=int, default=None)
    p.add_argument('--results', default=None)
    p.add_argument('--plot', default=None)
    p.set_defaults(func=simulate)

    p = sub.add_parser('rates', help='fit convergence rates to a results CSV')
    p.add_argument('--in', dest='input', required=True)
    addTheory(p, required=True)
    p.add_argument('--scheme', default=None)
    p.add_argument('--tolerance', type=float, default=None)
    p.set_defaults(func=rates)

    p = sub.add_parser('diagnose', help='run the operator inequality suites')
    p.add_argument('--suite', action='append', default=None, choices=list(Diagnostics.suites.keys()))
    p.add_argument('--out', default=None)
    p.set_defaults(func=diagnose)

    p = sub.add_parser('filters-check', help='check the filter conditions on (lambda, u) grids')
    p.add_argument('--kind', default='all', choices=('all', 'tikhonov', 'landweber', 'cutoff'))
    p.add_argument('--nlambda', type=int, default=1000)
    p.add_argument('--nu', type=int, default=1000)
    p.add_argument('--nus', type=float, nargs='+', default=list(Filter.default_nus))
    p.set_defaults(func=filtersCheck)

    p = sub.add_parser('plot', help='draw the log-log rate plot of a results CSV')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--out', required=True)
    addTheory(p, required=False)
    p.set_defaults(func=plot)
    return parser


def run_command(argv):
    """Run one subcommand and return its exit code."""
    try:
        args = makeParser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        return args.func(args)
    except SPyShiftError as e:
        logger.error('{}: {}'.format(type(e).__name__, e))
        print('{}: {}'.format(type(e).__name__, e), file=sys.stderr)
        return e.exitcode
    except (IOError, OSError) as e:
        logger.error(str(e))
        print(str(e), file=sys.stderr)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == '__main__':
    main()
