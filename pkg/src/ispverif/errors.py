"""Exception types shared across the framework."""


class TestbenchFatal(Exception):
    """Unrecoverable testbench error. ``code`` is a short machine-readable tag."""

    __test__ = False  # keep pytest from collecting this as a test class

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class ConfigError(TestbenchFatal):
    """Bad configuration detected before or during a run."""
