"""splitmix64 pseudo-random stream."""

MASK64 = 0xFFFF_FFFF_FFFF_FFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """Seeded 64-bit generator; ``steps`` counts outputs drawn so far."""

    __slots__ = ("state", "steps")

    def __init__(self, seed: int):
        self.state = seed & MASK64
        self.steps = 0

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        self.steps += 1
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Value in ``range(n)`` (modulo reduction; bias is irrelevant here)."""
        return self.next() % n

    def between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)
