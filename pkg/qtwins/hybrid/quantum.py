"""Quantum layer of the hybrid model and its parameter-shift gradients.

The layer runs on the density-matrix simulator in numpy. ``ParameterShift``
makes it a node in the torch autograd graph: forward evaluates the Z
expectations, backward runs the shifted circuits.
"""

import logging
from dataclasses import dataclass

import numpy as np
import torch
from sim import DensityMatrixSimulator, build_embedding_circuit, build_variational_layer, expectation_z
from twins import QuantumDigitalTwin

logger = logging.getLogger(__name__)

SHIFT = np.pi / 2


class QuantumLayer:
    """Angle embedding plus one trainable RY layer, evaluated as Z expectations."""

    def __init__(
        self,
        register_size: int,
        twin: QuantumDigitalTwin | None = None,
        entangle: bool = False,
        validate: bool | None = None,
    ):
        self.register_size = register_size
        self.twin = twin
        self.simulator = DensityMatrixSimulator(twin, validate=validate)
        self.slots = tuple(f"theta{i}" for i in range(register_size))
        self.variational = build_variational_layer(register_size, self.slots, entangle=entangle)

    def __call__(self, angles, thetas) -> np.ndarray:
        circuit = build_embedding_circuit(self.register_size, list(angles)) + self.variational
        rho = self.simulator.run(circuit, dict(zip(self.slots, (float(t) for t in thetas), strict=True)))
        return expectation_z(rho)


@dataclass(frozen=True)
class QuantumJacobian:
    """Quantum layer output and its partials at one input.

    ``d_angles[k, j]`` is dz_k / d angle_j and ``d_thetas[k, j]`` is dz_k / d theta_j.
    """

    z: np.ndarray
    d_angles: np.ndarray
    d_thetas: np.ndarray


def shift_jacobian(layer: QuantumLayer, angles: np.ndarray, thetas: np.ndarray, wrt_angles: bool) -> np.ndarray:
    """m x m Jacobian of z by the angles or the thetas, two executions per column."""
    m = len(angles)
    jac = np.empty((m, m))
    for j in range(m):
        columns = []
        for sign in (1.0, -1.0):
            a, t = angles.copy(), thetas.copy()
            if wrt_angles:
                a[j] += sign * SHIFT
            else:
                t[j] += sign * SHIFT
            columns.append(layer(a, t))
        jac[:, j] = (columns[0] - columns[1]) / 2
    return jac


def layer_jacobian(layer: QuantumLayer, angles, thetas) -> QuantumJacobian:
    """Parameter-shift Jacobian using an existing quantum layer."""
    angles = np.asarray(angles, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    return QuantumJacobian(
        z=layer(angles, thetas),
        d_angles=shift_jacobian(layer, angles, thetas, wrt_angles=True),
        d_thetas=shift_jacobian(layer, angles, thetas, wrt_angles=False),
    )


def quantum_gradient(
    angles, thetas, twin: QuantumDigitalTwin | None = None, entangle: bool = False
) -> QuantumJacobian:
    """Jacobians of the Z expectations by the parameter-shift rule.

    Each partial is [z_k(p + pi/2) - z_k(p - pi/2)] / 2 from two full
    executions of the quantum layer, which is exact for RY parameters
    under parameter-independent noise.

    Args:
        angles: Embedding angles, one per qubit
        thetas: Trainable rotation angles, one per qubit
        twin: Twin whose noise the layer runs under; noiseless when None
        entangle: Whether the layer ends with a CX ring

    Returns:
        QuantumJacobian with z and both m x m Jacobians
    """
    layer = QuantumLayer(len(thetas), twin, entangle=entangle)
    return layer_jacobian(layer, angles, thetas)


class ParameterShift(torch.autograd.Function):
    """Batched quantum layer: (B, m) angles and (m,) thetas to (B, m) Z expectations."""

    @staticmethod
    def forward(ctx, angles: torch.Tensor, thetas: torch.Tensor, layer: QuantumLayer) -> torch.Tensor:
        if not (torch.isfinite(angles).all() and torch.isfinite(thetas).all()):
            raise FloatingPointError("non-finite rotation angles reached the quantum layer")
        ctx.layer = layer
        ctx.save_for_backward(angles, thetas)
        t = thetas.detach().numpy()
        z = np.array([layer(row, t) for row in angles.detach().numpy()])
        return torch.as_tensor(z.reshape(len(angles), layer.register_size), dtype=angles.dtype)

    @staticmethod
    def backward(ctx, grad_z: torch.Tensor):
        angles, thetas = ctx.saved_tensors
        want_angles, want_thetas = ctx.needs_input_grad[:2]
        a, t, g = angles.detach().numpy(), thetas.detach().numpy(), grad_z.detach().numpy()

        d_angles = np.zeros(a.shape)
        d_thetas = np.zeros(t.shape)
        # Accumulated in batch order
        for b, row in enumerate(a):
            if want_angles:
                d_angles[b] = shift_jacobian(ctx.layer, row, t, wrt_angles=True).T @ g[b]
            if want_thetas:
                d_thetas += shift_jacobian(ctx.layer, row, t, wrt_angles=False).T @ g[b]

        return (
            torch.as_tensor(d_angles, dtype=angles.dtype) if want_angles else None,
            torch.as_tensor(d_thetas, dtype=thetas.dtype) if want_thetas else None,
            None,
        )
