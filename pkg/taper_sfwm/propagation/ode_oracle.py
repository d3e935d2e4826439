import numpy as np

from scipy.integrate import solve_ivp

from taper_sfwm.exceptions import DomainError, OracleAccuracyError
from taper_sfwm.propagation.calc_coupling import PairCoupling
from taper_sfwm.propagation.calc_transfer_matrix import TransferMatrix
from taper_sfwm.waveguide.taper_profile import TaperProfile


def ode_oracle(profile: TaperProfile,
               coupling: PairCoupling,
               fine_steps: int = 1000,
               rtol: float = 1e-10,
               atol: float = 1e-12) -> TransferMatrix:
    """
    Integrates the coupled-mode equations
        db_s/dz = j gamma e^{j phi} b_i^dag,  db_i^dag/dz = -j gamma e^{-j phi} b_s,
        dphi/dz = delta_kappa
    for the fundamental matrix with an adaptive Dormand-Prince 5(4) scheme.

    Parameters
    ----------
    profile : TaperProfile
        Fixes the length and the step bound period_m / fine_steps.
    coupling : PairCoupling
        gamma(z) and delta_kappa(z), one row per pump pair.
    fine_steps : int
        Minimum number of integration steps per tapering period.

    Raises
    ------
    DomainError
        If fine_steps does not exceed the engine's steps_per_period.
    OracleAccuracyError
        If the integrator fails to meet the tolerances.
    """
    if fine_steps <= profile.steps_per_period:
        raise DomainError(f'fine_steps={fine_steps} must exceed steps_per_period={profile.steps_per_period}')

    pairs = np.atleast_1d(coupling.gamma(0.0)).size

    def rhs(z, y):
        phase = y[4:].real
        g = np.atleast_1d(coupling.gamma(z))
        rate = np.sum(1j * g * np.exp(1j * phase))
        dy = np.empty_like(y)
        dy[0] = rate * y[2]
        dy[1] = rate * y[3]
        dy[2] = np.conj(rate) * y[0]
        dy[3] = np.conj(rate) * y[1]
        dy[4:] = np.atleast_1d(coupling.delta_kappa(z))
        return dy

    y0 = np.zeros(4 + pairs, dtype=complex)
    y0[0] = y0[3] = 1.0

    try:
        solution = solve_ivp(rhs, (0.0, profile.length), y0, method='RK45',
                             rtol=rtol, atol=atol, max_step=profile.period_m / fine_steps)
    except (ValueError, FloatingPointError) as exc:
        raise OracleAccuracyError(f'ODE oracle failed: {exc}') from exc

    if not solution.success:
        raise OracleAccuracyError(f'ODE oracle failed: {solution.message}')

    y = solution.y[:, -1]
    return TransferMatrix(y[0], y[1], y[2], y[3])
