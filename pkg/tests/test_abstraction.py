import math

import numpy as np
import pytest

from symabs.abstraction import (
    AugmentedState,
    initial_pair_check,
    omega_distance,
    simulate_augmented,
)
from symabs.dynamics import PiecewiseConstantSignal, SineSystem
from symabs.errors import BadRange, DimensionMismatch, InputViolation, OutOfDomain
from symabs.interface import AffineInterface, BoxInputSet
from symabs.lattice import LatticeParams, quantize


def demo_system():
    return SineSystem(A=np.diag([0.15, 0.5]), m_gain=2.0)


def demo_interface():
    return AffineInterface(gain=-5.0 * np.eye(2))


def constant_signal(values, domain_end):
    return PiecewiseConstantSignal(
        breakpoints=np.array([0.0]),
        values=np.array([values], dtype=float),
        domain_end=domain_end,
    )


def test_omega_distance():
    assert omega_distance(AugmentedState(x1=np.array([1.0, 1.0]), x2=np.zeros(2))) == pytest.approx(
        math.sqrt(2.0), abs=1e-15
    )
    assert omega_distance(AugmentedState(x1=np.zeros(3), x2=np.zeros(3))) == 0.0
    with pytest.raises(DimensionMismatch):
        omega_distance(AugmentedState(x1=np.zeros(2), x2=np.zeros(3)))


def test_initial_pair_check():
    assert initial_pair_check([0.0, 0.0], [0.15, 0.0], eta=0.15)
    assert not initial_pair_check([0.0, 0.0], [0.15 + 1e-9, 0.0], eta=0.15)
    with pytest.raises(BadRange):
        initial_pair_check([0.0], [0.0], eta=0.0)


def test_run_structure_and_invariants():
    params = LatticeParams(n=2, eta=0.15)
    run = simulate_augmented(
        demo_system(), demo_interface(), [0.4, -0.7],
        constant_signal([0.3, -0.1], 1.0), params, 0.5, 1e-3,
    )
    n_samples = 501
    assert run.times.shape == (n_samples,)
    assert run.x1_states.shape == (n_samples, 2)
    assert run.times[-1] == pytest.approx(0.5, abs=1e-12)

    # the recorded abstract state is exactly the quantized phi
    for i in (0, 123, n_samples - 1):
        q = quantize(run.phi_states[i], params)
        assert np.array_equal(run.x2_states[i], q.coordinates)

    # the recorded input is exactly the interface formula
    gain = demo_interface().gain
    expected_u = run.v_values + (run.x1_states - run.x2_states) @ gain.T
    assert np.array_equal(run.u_values, expected_u)

    # phi starts at the quantized initial state
    q0 = quantize(np.array([0.4, -0.7]), params)
    assert np.array_equal(run.phi_states[0], q0.coordinates)

    # output gap column is the recorded norm (output map is identity)
    ref = np.linalg.norm(run.x1_states - run.x2_states, axis=1)
    assert np.array_equal(run.y_err, ref)


def test_zero_horizon_reduces_to_quantization():
    params = LatticeParams(n=2, eta=0.15)
    x0 = [0.4, -0.7]
    run = simulate_augmented(
        demo_system(), demo_interface(), x0, constant_signal([0.0, 0.0], 1.0),
        params, 0.0, 1e-3,
    )
    assert run.times.shape == (1,)
    assert run.y_err[0] <= 0.15
    q0 = quantize(np.array(x0), params)
    assert np.array_equal(run.x2_states[0], q0.coordinates)


def test_equilibrium_run_stays_at_origin():
    # the origin is a lattice point and a shared equilibrium under v = 0
    params = LatticeParams(n=2, eta=0.15)
    run = simulate_augmented(
        demo_system(), demo_interface(), [0.0, 0.0],
        constant_signal([0.0, 0.0], 1.0), params, 1.0, 1e-3,
    )
    assert np.all(run.y_err == 0.0)
    assert np.all(run.u_values == 0.0)


def test_gap_stays_bounded_on_demo_run():
    params = LatticeParams(n=2, eta=0.15)
    run = simulate_augmented(
        demo_system(), demo_interface(), [0.9, 0.9],
        constant_signal([0.4, -0.4], 10.0), params, 5.0, 1e-3,
    )
    # certified offset for the demo data, plus the initial transient
    K1 = 2.3109041039770077
    assert float(np.max(run.y_err)) <= (K1 + 1.0) * 0.15 + 0.01


def test_input_violation_detection():
    params = LatticeParams(n=2, eta=0.15)
    tight = BoxInputSet(lower=np.array([-1e-9, -1e-9]), upper=np.array([1e-9, 1e-9]))
    # off-lattice start forces a nonzero correction at t = 0
    with pytest.raises(InputViolation):
        simulate_augmented(
            demo_system(), demo_interface(), [0.4, -0.7],
            constant_signal([0.0, 0.0], 1.0), params, 0.5, 1e-3, input_box=tight,
        )


def test_dimension_and_domain_errors():
    params = LatticeParams(n=2, eta=0.15)
    sig = constant_signal([0.0, 0.0], 1.0)
    with pytest.raises(DimensionMismatch):
        simulate_augmented(
            demo_system(), demo_interface(), [0.0, 0.0, 0.0], sig, params, 0.5, 1e-3
        )
    with pytest.raises(DimensionMismatch):
        simulate_augmented(
            demo_system(), demo_interface(), [0.0, 0.0], sig,
            LatticeParams(n=3, eta=0.15), 0.5, 1e-3,
        )
    with pytest.raises(DimensionMismatch):
        simulate_augmented(
            demo_system(), AffineInterface(gain=np.zeros((3, 2))), [0.0, 0.0],
            sig, params, 0.5, 1e-3,
        )
    with pytest.raises(OutOfDomain):
        simulate_augmented(
            demo_system(), demo_interface(), [0.0, 0.0], sig, params, 2.0, 1e-3
        )
