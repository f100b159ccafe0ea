"""Length spectrum, zeta functions and transfer-operator resonances of the modular surface."""

__version__ = "0.1.0"

from .errors import (BoundaryHitError, ConvergenceError, DomainError,  # noqa: E402
                     OracleIncompleteError, PoleError)
from .psl2 import GroupElement, INF, IDENTITY, S, T, T1, T2  # noqa: E402
from .dynamics import (Necklace, QuadraticIrrational, canonicalize, enumerate_necklaces,  # noqa: E402
                       farey_step, fixed_point, is_primitive, orbit_code, word_matrix)
from .lengths import (LengthSpectrumEntry, conjugacy_oracle, geodesic_length,  # noqa: E402
                      length_spectrum, selberg_zeta_euler, torus_spectrum, torus_zeta)
from .hurwitz import hurwitz_zeta  # noqa: E402
from .transfer import (CollocationGrid, OperatorMatrix, SpectralParameter,  # noqa: E402
                       eigenpair_near, farey_apply, fredholm_det, gauss_matrix, tau_action)
from .spectral import (PeriodFunction, ResonanceResult, boundary_residual,  # noqa: E402
                       cocycle_residuals, lambda_of, reconstruct_psi, refine_resonance,
                       scan_critical_line, three_term_residual)
