"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    Carries the full list of validation problems so a user can fix a
    config file in one pass instead of replaying errors one by one.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class GuardError(RuntimeError):
    """A numerical guard tripped (boundary leak, memory guard, ...).

    Runs that trip a guard are considered corrupted and abort rather
    than silently producing wrong physics.
    """


class MeasurementError(RuntimeError):
    """A diagnostic could not produce a trustworthy number.

    Examples: no oscillation peak above the spectral floor, transmission
    lobes not separated, pseudospin field not compactifiable.
    """
