import dataclasses


@dataclasses.dataclass(frozen=True)
class Ring:
    """
    Coefficient ring tag: `modulus == 0` means the integers, otherwise ℤ/modulus.
    """

    modulus: int = 0

    def __post_init__(self) -> None:
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError(f"Invalid ring modulus {self.modulus}")

    @property
    def is_integral(self) -> bool:
        return self.modulus == 0

    @property
    def two_exponent(self) -> int:
        """
        The n of ℤ/2ⁿ. Raises ValueError for any other ring.
        """
        n = self.modulus.bit_length() - 1
        if self.modulus < 2 or self.modulus != 1 << n:
            raise ValueError(f"{self} is not of the form Z/2^n")
        return n

    def reduce(self, value: int) -> int:
        if self.modulus:
            return value % self.modulus
        return value

    def __str__(self) -> str:
        return "Z" if self.modulus == 0 else f"Z/{self.modulus}"


ZZ = Ring(0)


def Zmod(m: int) -> Ring:
    return Ring(m)
