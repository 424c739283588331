"""Physical constants (CGS-Gaussian), particle catalog, and closed-form ratio checks.

Everything here is fixed-point arithmetic on a pinned constants table:
lengths in cm, masses in g, charges in esu, energies in erg. The table is
never recomputed at runtime.
"""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Constants:
    """Pinned CGS-Gaussian constants table (CODATA 2018 values)."""

    hbar: float = 1.054571817e-27   # erg s
    c: float = 2.99792458e10        # cm/s (exact)
    G: float = 6.67430e-8           # cm^3 g^-1 s^-2
    e: float = 4.80320471e-10       # elementary charge, esu
    esu_ref: float = 1.0            # reference charge e' = 1 esu

    def __post_init__(self):
        for name in ("hbar", "c", "G", "e", "esu_ref"):
            if getattr(self, name) <= 0:
                raise ValueError(f"constant {name} must be strictly positive")


CGS = Constants()


@dataclass(frozen=True)
class ParticleSpec:
    """Named particle; the anchor for every derived scale."""

    name: str
    mass: float     # g
    charge: float   # esu, signed
    spin: float     # multiple of hbar: 0, 1/2, 1, ...

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("mass must be non-negative")
        if self.spin < 0 or round(2 * self.spin) != 2 * self.spin:
            raise ValueError("spin must be a non-negative multiple of 1/2")


# Built-in catalog. Masses CODATA 2018; charm taken at 1.8 GeV/c^2 with
# charge +2e/3 (1 GeV/c^2 = 1.78266192e-24 g).
BUILTIN_PARTICLES = {
    "electron": ParticleSpec("electron", 9.1093837015e-28, -4.80320471e-10, 0.5),
    "proton": ParticleSpec("proton", 1.67262192369e-24, 4.80320471e-10, 0.5),
    "muon": ParticleSpec("muon", 1.883531627e-25, -4.80320471e-10, 0.5),
    "neutrino": ParticleSpec("neutrino", 0.0, 0.0, 0.5),
    "charm": ParticleSpec("charm", 1.8 * 1.78266192e-24, 2 * 4.80320471e-10 / 3, 0.5),
}


def load_catalog(path):
    """Read a plain-text particle table: one `name mass_g charge_esu spin` per line.

    A line holding only a name resolves against the built-in catalog.
    Blank lines and `#` comments are skipped.
    """
    catalog = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) == 1:
                name = tokens[0]
                if name not in BUILTIN_PARTICLES:
                    raise ValueError(
                        f"{path}:{lineno}: unknown particle {name!r} (not in built-in catalog)"
                    )
                catalog[name] = BUILTIN_PARTICLES[name]
            elif len(tokens) == 4:
                name, mass, charge, spin = tokens
                catalog[name] = ParticleSpec(name, float(mass), float(charge), float(spin))
            else:
                raise ValueError(
                    f"{path}:{lineno}: expected `name` or `name mass charge spin`, got {raw!r}"
                )
    return catalog


@dataclass(frozen=True)
class RatioCheck:
    """A computed-vs-reference comparison with a declared tolerance.

    tolerance_kind is either "relative" (tolerance = epsilon) or
    "order_of_magnitude" (tolerance = decades of |log10(computed/reference)|).
    """

    id: str
    computed: float
    reference: float
    tolerance_kind: str
    tolerance: float
    passed: bool = field(init=False)
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", self._evaluate())

    def _evaluate(self):
        if self.tolerance_kind == "relative":
            return abs(self.computed - self.reference) <= self.tolerance * abs(self.reference)
        if self.tolerance_kind == "order_of_magnitude":
            if self.computed <= 0 or self.reference <= 0:
                return False
            return abs(math.log10(self.computed / self.reference)) <= self.tolerance
        raise ValueError(f"unknown tolerance kind {self.tolerance_kind!r}")

    @classmethod
    def relative(cls, id, computed, reference, epsilon, note=""):
        return cls(id, float(computed), float(reference), "relative", float(epsilon), note=note)

    @classmethod
    def order_of_magnitude(cls, id, computed, reference, decades, note=""):
        return cls(id, float(computed), float(reference), "order_of_magnitude",
                   float(decades), note=note)

    @classmethod
    def upper_bound(cls, id, value, bound, note=""):
        # Encodes 0 <= value <= bound as |value - bound/2| <= 1.0 * (bound/2),
        # staying within the two declared tolerance kinds.
        return cls(id, float(value), float(bound) / 2.0, "relative", 1.0, note=note)

    @classmethod
    def interval(cls, id, value, lo, hi, note=""):
        # lo <= value <= hi as a relative check about the midpoint.
        if not lo < hi:
            raise ValueError("need lo < hi")
        mid = 0.5 * (lo + hi)
        if mid == 0.0:
            raise ValueError("interval midpoint must be nonzero for a relative check")
        return cls(id, float(value), mid, "relative", (hi - lo) / (2 * abs(mid)), note=note)

    def to_dict(self):
        return {
            "id": self.id,
            "computed": self.computed,
            "reference": self.reference,
            "tolerance_kind": self.tolerance_kind,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["id"], d["computed"], d["reference"], d["tolerance_kind"],
                   d["tolerance"], note=d.get("note", ""))


def _require_massive(p):
    if p.mass <= 0:
        raise ValueError(
            f"{p.name}: massless particle admits no Compton-scale derivation"
        )


def compton_wavelength(p, constants=CGS):
    """Reduced Compton wavelength hbar/(m c), cm."""
    _require_massive(p)
    return constants.hbar / (p.mass * constants.c)


def half_compton_wavelength(p, constants=CGS):
    """hbar/(2 m c): the vortex/shell radius used throughout, cm."""
    return 0.5 * compton_wavelength(p, constants)


def classical_radius(p, constants=CGS):
    """Classical charge radius e^2/(m c^2), cm."""
    _require_massive(p)
    if p.charge == 0:
        raise ValueError(f"{p.name}: classical radius undefined for zero charge")
    return p.charge**2 / (p.mass * constants.c**2)


def coupling_identities(p, constants=CGS):
    """hbar*c/e^2 through two algebraic routes, the rounded-length variant,
    and the e*Phi = m*c^2 shell identity.
    """
    _require_massive(p)
    if p.charge == 0:
        raise ValueError(f"{p.name}: coupling checks undefined for zero charge")
    direct = constants.hbar * constants.c / p.charge**2
    via_lengths = compton_wavelength(p, constants) / classical_radius(p, constants)
    # Historical rounded lengths: hbar/mc ~ 3.8e-11 cm, e^2/mc^2 ~ 2.8e-13 cm.
    rounded = 3.8e-11 / 2.8e-13
    a = classical_radius(p, constants)
    phi = abs(p.charge) / a
    e_phi_over_rest = abs(p.charge) * phi / (p.mass * constants.c**2)
    return [
        RatioCheck.relative("hbar-c-over-e2", direct, 137.04, 0.5 / 137.04),
        RatioCheck.relative("hbar-c-over-e2-via-lengths", via_lengths, direct, 1e-12),
        RatioCheck.relative("hbar-c-over-e2-rounded", rounded, 135.7, 0.5 / 135.7),
        RatioCheck.relative("e-phi-equals-rest-energy", e_phi_over_rest, 1.0, 1e-12),
    ]


def gravity_em_ratio(p, constants=CGS, reference=1e40, decades=3.0):
    """e^2/(G m^2) against the heuristic 1e40, order-of-magnitude tolerance."""
    _require_massive(p)
    if p.charge == 0:
        raise ValueError(f"{p.name}: ratio undefined for zero charge")
    computed = p.charge**2 / (constants.G * p.mass**2)
    return RatioCheck.order_of_magnitude("charge-to-gravity-ratio", computed,
                                         reference, decades)


def monopole_strength(n, constants=CGS):
    """Pole strength mu = n hbar c / (2 e), esu-equivalent."""
    if n < 1 or int(n) != n:
        raise ValueError("winding number n must be a positive integer")
    return 0.5 * n * constants.hbar * constants.c / constants.e


def extreme_scales(p, constants=CGS):
    """Shortest time/length scales and the exact mc^2 / |p||a| identities.

    Returns a dict with t = hbar/(m c^2), x = c t, momentum = m c, the
    inferred proportionality constant y = momentum*c/m (== c^2 exactly),
    and p_times_a = momentum * x (== hbar exactly).
    """
    _require_massive(p)
    c, hbar = constants.c, constants.hbar
    t = hbar / (p.mass * c**2)
    x = c * t
    momentum = p.mass * c
    y = momentum * c / p.mass
    return {
        "t": t,
        "x": x,
        "momentum": momentum,
        "y": y,
        "y_over_c2": y / c**2,
        "p_times_a": momentum * x,
        "p_times_a_over_hbar": momentum * x / hbar,
    }
