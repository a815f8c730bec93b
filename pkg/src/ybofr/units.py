"""Atomic-unit conversions.

Everything inside the package works in Hartree atomic units
(hbar = m_e = a0 = 1). Frequencies quoted in the literature are cyclic
(nu = E/h), so 1 MHz of "frequency units" is h * 1 MHz of energy.
"""

from scipy import constants as _c

HARTREE_J = _c.physical_constants["atomic unit of energy"][0]
HARTREE_HZ = _c.physical_constants["hartree-hertz relationship"][0]
HARTREE_MHZ = HARTREE_HZ * 1e-6
BOHR_M = _c.physical_constants["Bohr radius"][0]
BOHR_CM = BOHR_M * 100.0
AU_TIME_S = _c.physical_constants["atomic unit of time"][0]
ELECTRON_MASS_U = _c.physical_constants["electron mass in u"][0]
KB_HARTREE_PER_K = _c.k / HARTREE_J
SPEED_OF_LIGHT_AU = 1.0 / _c.fine_structure
# W/cm^2 in atomic units of intensity (E_h / (t_au * a0^2))
AU_INTENSITY_W_CM2 = HARTREE_J / AU_TIME_S / BOHR_CM**2


def mhz_to_au(f):
    return f / HARTREE_MHZ


def au_to_mhz(e):
    return e * HARTREE_MHZ


def khz_to_au(f):
    return f * 1e-3 / HARTREE_MHZ


def au_to_khz(e):
    return e * HARTREE_MHZ * 1e3


def kelvin_to_au(t):
    return t * KB_HARTREE_PER_K


def au_to_kelvin(e):
    return e / KB_HARTREE_PER_K


def amu_to_au(m):
    """Mass in unified atomic mass units -> electron masses."""
    return m / ELECTRON_MASS_U


def nm_to_bohr(x):
    return x * 1e-9 / BOHR_M


def bohr_to_m(x):
    return x * BOHR_M


def m_to_bohr(x):
    return x / BOHR_M


def w_cm2_to_au(i):
    return i / AU_INTENSITY_W_CM2


def au_to_w_cm2(i):
    return i * AU_INTENSITY_W_CM2


def au_time_to_s(t):
    return t * AU_TIME_S


def s_to_au_time(t):
    return t / AU_TIME_S


def angular_rate_to_au(omega):
    """Angular frequency in rad/s -> energy hbar*omega in Hartree."""
    return omega * AU_TIME_S


def cyclic_hz_to_angular_au(nu):
    """A linewidth given as Gamma/2pi in Hz -> hbar*Gamma in Hartree."""
    return nu / HARTREE_HZ


def per_cm3_to_au(n):
    return n * BOHR_CM**3


def cm3_per_s_from_au(k):
    """Rate coefficient a0^3 / t_au -> cm^3/s."""
    return k * BOHR_CM**3 / AU_TIME_S
