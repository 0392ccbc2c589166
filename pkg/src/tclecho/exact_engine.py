"""
Numerically exact Hahn echo of one electron coupled to a few nuclei.

The Hamiltonian (electron Zeeman removed by the rotating frame) is::

    H = Sz (x) sum_k A_k Iz_k + sum_k w_k Iz_k
        + sum_{k<l} b_kl (Iz_k Iz_l - 1/4 (I+_k I-_l + I-_k I+_l))

with the electron as the first tensor factor. It commutes with Sz, so it is
block diagonal in the electron basis and each block is diagonalised once and
reused for every time point.

Echo protocol: ``|+><+| (x) rho_n`` evolves for a delay ``t``, an ideal
instantaneous pi pulse about x flips the electron, and the state evolves for
another ``t``. ``rho_n`` defaults to the maximally mixed nuclear state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sps

from .errors import DimensionError, DomainError
from .spin_model import FieldConfig, NuclearSpin, PairParams, dipolar_coupling, spin_matrices
from . import tcl_engine

MAX_DIM = 4096
PSD_TOL = 1e-12


@dataclass
class SpinSystem:
    field: FieldConfig
    nuclei: list[NuclearSpin]
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        ids = [n.id for n in self.nuclei]
        if len(set(ids)) != len(ids):
            raise DomainError("nuclear ids must be unique")
        sym = {}
        for (k, l), b in dict(self.couplings).items():
            if not np.isfinite(b):
                raise DomainError(f"coupling {(k, l)} is not finite")
            sym[(min(k, l), max(k, l))] = float(b)
        self.couplings = sym

    @classmethod
    def from_spins(cls, spins: Sequence[NuclearSpin], field: FieldConfig | None = None, couplings=None):
        """System with every pair coupled by its point-dipole ``b_kl`` unless ``couplings`` is given."""
        spins = list(spins)
        if couplings is None:
            couplings = {(k.id, l.id): dipolar_coupling(k, l) for k, l in itertools.combinations(spins, 2)}
        return cls(field or FieldConfig(), spins, couplings)

    @classmethod
    def for_pair(cls, delta: float, b: float, field: FieldConfig | None = None):
        """Electron plus two protons with ``A_1 = delta``, ``A_2 = 0`` and coupling ``b``."""
        n1 = NuclearSpin.from_isotope(0, "1H", (0.0, 0.0, 0.0), A_zz=delta)
        n2 = NuclearSpin.from_isotope(1, "1H", (1.0, 0.0, 0.0), A_zz=0.0)
        return cls(field or FieldConfig(), [n1, n2], {(0, 1): b})

    @property
    def nuclear_dims(self) -> list[int]:
        return [n.multiplicity for n in self.nuclei]

    @property
    def dim(self) -> int:
        return 2 * int(np.prod(self.nuclear_dims, dtype=np.int64))

    def coupling(self, k: int, l: int) -> float:
        return self.couplings.get((min(k, l), max(k, l)), 0.0)


def _embed(local: Mapping[int, np.ndarray], dims: Sequence[int]):
    out = sps.identity(1, format="csr")
    for i, d in enumerate(dims):
        out = sps.kron(out, local.get(i, sps.identity(d)), format="csr")
    return out


def _reference_larmor(system: SpinSystem) -> float:
    # rotating frame at the Larmor frequency of the most common isotope
    if not system.nuclei:
        return 0.0
    counts: dict[str, list[float]] = {}
    for n in system.nuclei:
        counts.setdefault(n.isotope, []).append(n.gamma)
    gammas = max(counts.values(), key=len)
    return system.field.larmor(gammas[0])


def nuclear_operators(system: SpinSystem):
    """Sparse nuclear-space pieces ``(H_nuc, V)`` with ``V = sum_k A_k Iz_k``.

    ``H_nuc`` holds the nuclear Zeeman terms (in a frame rotating at the
    reference Larmor frequency) and all flip-flop couplings.
    """
    dims = system.nuclear_dims
    D = int(np.prod(dims, dtype=np.int64))
    if 2 * D > MAX_DIM:
        raise DimensionError(f"Hilbert dimension {2 * D} exceeds cap {MAX_DIM}")
    mats = [spin_matrices(n.spin_I) for n in system.nuclei]
    Iz = [_embed({i: sps.csr_matrix(m[0])}, dims) for i, m in enumerate(mats)]
    w_ref = _reference_larmor(system)

    H = sps.csr_matrix((D, D))
    V = sps.csr_matrix((D, D))
    for i, n in enumerate(system.nuclei):
        V = V + n.A_zz * Iz[i]
        H = H + (system.field.larmor(n.gamma) - w_ref) * Iz[i]
    for i, j in itertools.combinations(range(len(system.nuclei)), 2):
        b = system.coupling(system.nuclei[i].id, system.nuclei[j].id)
        if b == 0.0:
            continue
        _, pi, mi = mats[i]
        _, pj, mj = mats[j]
        ff = _embed({i: sps.csr_matrix(pi), j: sps.csr_matrix(mj)}, dims)
        ff = ff + _embed({i: sps.csr_matrix(mi), j: sps.csr_matrix(pj)}, dims)
        H = H + b * (Iz[i] @ Iz[j] - 0.25 * ff)
    return H, V


def build_hamiltonian(system: SpinSystem) -> np.ndarray:
    """Dense ``dim x dim`` Hamiltonian in rad s^-1, electron first."""
    H_nuc, V = nuclear_operators(system)
    Sz = sps.csr_matrix(np.diag([0.5, -0.5]))
    H = sps.kron(Sz, V) + sps.kron(sps.identity(2), H_nuc)
    return H.toarray()


def total_nuclear_iz(system: SpinSystem) -> np.ndarray:
    dims = system.nuclear_dims
    tot = sum(
        (_embed({i: sps.csr_matrix(spin_matrices(n.spin_I)[0])}, dims) for i, n in enumerate(system.nuclei)),
        sps.csr_matrix((int(np.prod(dims)), int(np.prod(dims)))),
    )
    return sps.kron(sps.identity(2), tot).toarray()


def thermal_nuclear_state(system: SpinSystem, temperature: float) -> np.ndarray:
    """Nuclear Gibbs state at ``temperature`` (K) for the lab-frame nuclear Zeeman Hamiltonian."""
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    kB_over_hbar = 1.380649e-23 / 1.054571817e-34
    H_nuc, _ = nuclear_operators(system)
    dims = system.nuclear_dims
    w_ref = _reference_larmor(system)
    for i, n in enumerate(system.nuclei):
        H_nuc = H_nuc + w_ref * _embed({i: sps.csr_matrix(spin_matrices(n.spin_I)[0])}, dims)
    lam, E = np.linalg.eigh(H_nuc.toarray())
    p = np.exp(-(lam - lam.min()) / (kB_over_hbar * temperature))
    p /= p.sum()
    return (E * p) @ E.conj().T


class ExactEcho:
    """Cached eigensystems of both electron-manifold blocks of one system.

    Parameters
    ----------
    system : SpinSystem
    nuclear_state : ndarray, optional
        Initial nuclear density matrix. Maximally mixed if omitted.
    """

    def __init__(self, system: SpinSystem, nuclear_state: np.ndarray | None = None):
        self.system = system
        H_nuc, V = nuclear_operators(system)
        H_nuc = H_nuc.toarray()
        V = V.toarray()
        self.D = H_nuc.shape[0]
        self.lam_up, self.E_up = np.linalg.eigh(H_nuc + 0.5 * V)
        self.lam_dn, self.E_dn = np.linalg.eigh(H_nuc - 0.5 * V)
        self.M = self.E_up.conj().T @ self.E_dn
        if nuclear_state is None:
            self.rho_n = None
        else:
            rho_n = np.asarray(nuclear_state, dtype=complex)
            self.rho_n = self.E_up.conj().T @ rho_n @ self.E_up

    def _blocks(self, t: float):
        p_up = np.exp(-1j * self.lam_up * t)
        p_dn = np.exp(-1j * self.lam_dn * t)
        M = self.M
        # U_up U_dn and (U_dn U_up)^dagger, both in the up-block eigenbasis
        A = (p_up[:, None] * M * p_dn[None, :]) @ M.conj().T
        B = (p_up.conj()[:, None] * M * p_dn.conj()[None, :]) @ M.conj().T
        return A, B

    def echo_factor(self, t: float) -> complex:
        """``Tr[U_up U_dn rho_n (U_dn U_up)^dagger]``; equals 1 at ``t = 0``."""
        if t < 0:
            raise DomainError("t must be >= 0")
        A, B = self._blocks(t)
        if self.rho_n is None:
            return complex(np.einsum("ij,ji->", A, B) / self.D)
        return complex(np.trace(A @ self.rho_n @ B))

    def coherence(self, t: float, initial_coherence: complex = 0.5) -> complex:
        # the pi pulse about x swaps rho01 and rho10 before the second delay
        return np.conj(initial_coherence) * self.echo_factor(t)

    def series(self, times, initial_coherence: complex = 0.5) -> tcl_engine.EchoSeries:
        c0 = abs(initial_coherence)
        vals = [abs(self.coherence(t, initial_coherence)) / c0 for t in np.asarray(times, dtype=float)]
        return tcl_engine.EchoSeries(np.asarray(times, dtype=float), np.array(vals), "EXACT")


def hahn_echo_coherence(system: SpinSystem, t: float, initial_coherence: complex = 0.5) -> complex:
    """Electron ``rho01`` at the echo after delay ``t`` on either side of the pi pulse."""
    return ExactEcho(system).coherence(t, initial_coherence)


def exact_series(system: SpinSystem, protocol: tcl_engine.EchoProtocol, nuclear_state=None):
    return ExactEcho(system, nuclear_state).series(protocol.times, protocol.initial_coherence)


def partial_trace_nuclei(rho: np.ndarray, D: int) -> np.ndarray:
    """Trace out the nuclear factor of a ``(2 D) x (2 D)`` matrix, electron first."""
    return np.einsum("ajbj->ab", rho.reshape(2, D, 2, D))


def echo_density_matrix(
    system: SpinSystem, t: float, initial_coherence: complex = 0.5, nuclear_state=None
) -> "ElectronDensityMatrix":
    """Full-space propagation followed by a partial trace over the nuclei.

    Slower than :class:`ExactEcho` but shares none of its block algebra, so
    the two serve as cross-checks of each other.
    """
    H = build_hamiltonian(system)
    D = H.shape[0] // 2
    lam, E = np.linalg.eigh(H)
    U = (E * np.exp(-1j * lam * t)) @ E.conj().T
    X = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(D))
    W = U @ X @ U
    rho_e0 = np.array([[0.5, initial_coherence], [np.conj(initial_coherence), 0.5]])
    rho_n = np.eye(D) / D if nuclear_state is None else np.asarray(nuclear_state)
    rho = W @ np.kron(rho_e0, rho_n) @ W.conj().T
    return ElectronDensityMatrix(partial_trace_nuclei(rho, D))


class ElectronDensityMatrix:
    """Validated 2x2 electron density matrix."""

    def __init__(self, matrix, tol: float = PSD_TOL):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=1e-10):
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-10:
            raise DomainError(f"trace {np.trace(m).real:.3g} != 1")
        if np.linalg.eigvalsh(m).min() < -tol:
            raise DomainError("density matrix is not positive semidefinite")
        self.matrix = 0.5 * (m + m.conj().T)

    @property
    def coherence(self) -> complex:
        return complex(self.matrix[0, 1])

    def without_phase(self) -> "ElectronDensityMatrix":
        """Same state with the off-diagonal phase rotated to zero (a z rotation)."""
        c = self.coherence
        phase = np.exp(-1j * np.angle(c)) if c != 0 else 1.0
        R = np.diag([1.0, np.conj(phase)])
        return ElectronDensityMatrix(R @ self.matrix @ R.conj().T)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"ElectronDensityMatrix({self.matrix!r})"


def tcl_density_matrix(envelope_value: float, initial_coherence: complex = 0.5) -> ElectronDensityMatrix:
    if not (-1e-15 <= envelope_value <= 1 + 1e-15):
        raise DomainError(f"envelope value {envelope_value} outside [0, 1]")
    c = initial_coherence * envelope_value
    return ElectronDensityMatrix([[0.5, c], [np.conj(c), 0.5]])


def _psd_sqrt(m):
    lam, E = np.linalg.eigh(m)
    return (E * np.sqrt(np.clip(lam, 0.0, None))) @ E.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    rho = ElectronDensityMatrix(rho).matrix if not isinstance(rho, ElectronDensityMatrix) else rho.matrix
    sigma = ElectronDensityMatrix(sigma).matrix if not isinstance(sigma, ElectronDensityMatrix) else sigma.matrix
    s = _psd_sqrt(rho)
    inner = s @ sigma @ s
    lam = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    f = np.sum(np.sqrt(np.clip(lam, 0.0, None))) ** 2
    return float(min(max(f, 0.0), 1.0))


@dataclass(frozen=True)
class SweepPoint:
    branch: str
    alpha_sq: float
    delta: float
    b: float
    fid_tcl2_half: float
    fid_tcl4_half: float
    fid_tcl2_revival: float
    fid_tcl4_revival: float


def coupling_for_amplitude(alpha_sq: float, branch: str, delta: float = 1.0) -> float:
    """Solve ``alpha^2(delta, b) = alpha_sq`` for ``b`` on the chosen branch.

    ``branch="below"`` returns ``|b| < |delta|``, ``"above"`` returns ``|b| > |delta|``.
    """
    if not 0 < alpha_sq <= 1:
        raise DomainError(f"alpha_sq must lie in (0, 1], got {alpha_sq}")
    a = np.sqrt(alpha_sq)
    root = np.sqrt(max(0.0, 1.0 - a * a))
    if branch == "below":
        ratio = (1.0 - root) / a
    elif branch == "above":
        ratio = (1.0 + root) / a
    else:
        raise DomainError(f"branch must be 'below' or 'above', got {branch!r}")
    if alpha_sq == 1.0:
        ratio = 1.0
    return ratio * delta


def fidelity_sweep(alpha_grid, branch: str = "both", delta: float = 1.0) -> list[SweepPoint]:
    """Exact vs TCL2/TCL4 fidelity at half revival and at full revival.

    For each target ``alpha_sq`` a three-spin system (electron and two protons)
    is built with ``delta`` fixed and ``b`` solved on the requested branch.
    """
    branches = ["below", "above"] if branch == "both" else [branch]
    out = []
    for br in branches:
        for a2 in alpha_grid:
            b = coupling_for_amplitude(float(a2), br, delta)
            system = SpinSystem.for_pair(delta, b)
            pair = PairParams.from_couplings(delta, b)
            tau = tcl_engine.revival_time(pair)
            fids = {}
            for label, t in (("half", 0.5 * tau), ("revival", tau)):
                exact = echo_density_matrix(system, t).without_phase()
                for order, wfun in (("tcl2", tcl_engine.w_tcl2), ("tcl4", tcl_engine.w_tcl4_exponent)):
                    tcl = tcl_density_matrix(float(np.exp(-wfun(pair, t))))
                    fids[f"fid_{order}_{label}"] = fidelity(exact, tcl)
            out.append(SweepPoint(br, pair.alpha_sq, delta, b, **fids))
    return out
