"""Post-processing for swarmsim run directories: static figures and a
markdown summary, consuming only the documented file schemas."""

from .artifacts import MissingArtifact, RunArtifacts, SchemaMismatch, load_run
from .render import render

__version__ = "0.1.0"
