from setuptools import setup

VERSION = '0.1.0'

setup(
    name='SPyShift',
    version=VERSION,
    package_dir={
        'SPyShift': '.',
        'SPyShift.debug': './debug',
        'SPyShift.documentation': './documentation',
    },
    packages=['SPyShift', 'SPyShift.debug', 'SPyShift.documentation'],
    description="Spectral Python for covariate Shift (weighted spectral regression algorithms and rate experiments)",
    license='MIT',
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'matplotlib', 'astropy'],
    entry_points={'console_scripts': ['spyshift = SPyShift.commands:main']},
)
