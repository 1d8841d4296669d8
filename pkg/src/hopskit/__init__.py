"""hopskit: hierarchy-of-pure-states simulator for open quantum systems."""

from .bath import OhmicSpectralDensity, nbar
from .expfit import ExponentialBCF, FitReport, fit_bcf, fit_error
from .stocproc import NoisePlan, StochasticProcess, plan_noise, sample_process

__version__ = "0.1.0"
