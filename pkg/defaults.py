# the inputs that go into creating the synthetic regression problem
problemkw = dict(

    # capacity exponent: the eigenvalues decay as mu_k = k**(-1/beta), 0 < beta <= 1
    beta=0.5,

    # regularity of the target, f_rho = L_K**r u_rho, r >= 1/2
    r=1.0,

    # how many eigenfunctions of the trigonometric basis should we keep?
    m=512,

    # half-width M of the uniform noise, |y - f_rho(x)| <= M
    noise=0.1,

    # a seed for the randomizer, for repeatability
    # (can be overridden by the $SPECTRAL_SHIFT_SEED environment variable)
    seed=0,
)

# the inputs that go into creating the covariate shift
shiftkw = dict(

    # what kind of shift between train and test marginals?
    #   options are ['none', 'bounded', 'log']
    family='bounded',

    # amplitude of the training density 1 + a*sin(2 pi x) (only for 'bounded')
    a=0.5,

    # the moment condition constants (alpha, C, sigma) on the density ratio
    alpha=1.0,
    C=1.0,
    sigma=2.0,
)

# the inputs that go into creating the filter function
filterkw = dict(

    # which spectral regularization?
    #   options are ['tikhonov', 'landweber', 'cutoff']
    kind='tikhonov',

    # number of Landweber iterations
    # (if None, t = round(1/lambda) is taken from the lambda schedule)
    t=None,
)

# the inputs that define the sample-size sweep
experimentkw = dict(

    # how should the density ratios enter the estimator?
    #   options are ['unweighted', 'exact', 'normalized', 'clipped'] (or a list of them)
    scheme='unweighted',

    # which lambda (and D_n) schedule?
    #   options are ['thm1', 'cor1', 'thm3', 'thm4']
    theorem='thm4',

    # sample sizes to sweep over (strictly increasing)
    n_grid=[256, 512, 1024, 2048, 4096, 8192],

    # how many independent training sets per sample size?
    trials=20,

    # the epsilon in the thm3 schedules (lambda and D_n), 0 < epsilon < r/(2r+beta)
    epsilon=0.05,

    # should wall-clock times be written into the results?
    # (leave False to keep the results byte-for-byte reproducible)
    timing=False,

    # where should the results table and the rate plot be written?
    # (None puts them in $SPYSHIFTDATA/outputs and $SPYSHIFTDATA/plots)
    results=None,
    plot=None,
)

inputs = dict(
    problem=problemkw,
    shift=shiftkw,
    filter=filterkw,
    experiment=experimentkw,
)


import copy

# the clipped-weight sweep under an unbounded density ratio
clipped = copy.deepcopy(inputs)
clipped['shift']['family'] = 'log'
clipped['shift']['alpha'] = 1.0
clipped['shift']['sigma'] = 3.0
clipped['experiment']['scheme'] = 'clipped'
clipped['experiment']['theorem'] = 'thm3'

# the saturation comparison, normalized against clipped weights for a smooth target;
# both schemes share the clipped-weight lambda schedule, so only the weighting differs
saturation = copy.deepcopy(clipped)
saturation['problem']['r'] = 2.0
saturation['problem']['beta'] = 1.0
saturation['experiment']['scheme'] = ['normalized', 'clipped']
saturation['experiment']['n_grid'] = [512, 1024, 2048, 4096, 8192]
saturation['experiment']['trials'] = 30
