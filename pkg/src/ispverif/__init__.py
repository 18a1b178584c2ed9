"""Transaction-level verification framework for an image-processing pipeline.

A golden reference model and a timed register-programmed stand-in share one
testbench: register model, control-bus and stream verification components,
a command-interpreting processor model with a Virtual Register Interface, and
a frame-comparing scoreboard.
"""

__version__ = "0.1.0"
