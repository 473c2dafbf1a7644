import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import region_of, t_adam, t_adapeg, t_adapeg_entropy, t_adapeg_unbounded, t_adapeg_vector, t_eg, t_movement
from vi_solve import Ball, Box, FreeSpace, Simplex, SolverConfig, run
from vi_solve.core import (
    EUCLIDEAN,
    ConfigurationError,
    LinearSkewOperator,
    MirrorMap,
    StochasticOracle,
    UnboundedSubproblemError,
    zero_operator,
)
from vi_solve.problems import gen_bilinear
from vi_solve.solvers import (
    ALGORITHMS,
    STEPPERS,
    AdamConfig,
    AdamMoments,
    adapeg_adam_step,
    adapeg_bregman_step,
    adapeg_step,
    baseline_step_size,
    eg_step,
    init_state,
    single_call_movement_step,
)

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])
ROT_OP = LinearSkewOperator(ROT)
X0 = np.array([3.0, 0.0])
BALL5 = Ball(np.zeros(2), 5.0)

# Frozen from the transcription oracle (tests/oracles.py, generic argmin + KKT polish).
ADAPEG_BALL_3 = (
    [[3.0, 3.0], [-1.7961328614751648, 4.666251894607602], [-4.923850332849806, 0.8693088632326563]],
    [[0.42752122286236754, 3.0], [-3.1367475681886754, 2.2480924770039543],
     [-3.890369097460497, -0.6539254726779201]],
    [1.1661903789690602, 1.5463413051613848, 1.8327976294774533],
)
ADAPEG_UNBOUNDED_FREE_5 = (
    [[3.0, 3.0], [-1.2426406871192857, 4.242640687119286], [-2.623306064338911, 0.2520112721108082],
     [-0.12303634544368643, -1.406678338370193], [1.2496771599917778, -0.41578087068147584]],
    [[0.0, 3.0], [-2.1213203435596433, 1.242640687119285], [-0.6694548822267852, -0.42397599677372133],
     [0.5456577470508114, -0.3987045860155987], [0.8791834472175964, 0.09747276028230153]],
    [1.414213562373095, 2.0424428695201757, 2.480490898750761, 2.674532477944307, 2.7334214607680702],
)
ADAEG_BALL_5 = (
    [[3.0, 3.0], [-2.1449575542752646, 3.366596424196456], [-3.4908178406106893, -0.5531869184742749],
     [-1.087088579078927, -2.878855489282791], [1.5669710917409843, -2.1586257310915156]],
    [[0.42752122286236754, 3.0], [-2.432090847415574, 1.351725972494369],
     [-2.0788278459026914, -1.3379534705860758], [0.01513638934260414, -2.1694529647914744],
     [1.5594103417386505, -1.0749662706122538]],
    [1.1661903789690602, 1.2767464900606877, 1.3490980092692397, 1.3979922999779277, 1.4320317027565674],
)
PEG_VARIANT_BALL_5 = (
    [[3.0, 3.0], [-2.0956706608941214, 4.539621623116578], [-4.999158465760498, -0.09173131534617061],
     [-3.1919390984660674, -3.84857438432514], [0.007157734915012503, -4.999994876680464]],
    [[0.0, 3.0], [-3.8926934272341627, 1.2029772336599591], [-3.834601319390875, -1.9629171135725534],
     [-1.83074383985111, -3.6248808429856294], [0.5573008766136425, -3.6214622412735813]],
)
OPTIM_VARIANT_BALL_5 = (
    [[3.0, 3.0], [-1.9240133372308355, 4.6149943313245645], [-4.999066327706145, 0.09662220859927596],
     [-2.631905958875843, -3.9090800092045725], [1.1063819793611982, -3.7676661284912276]],
    [[0.4275212228623677, 2.5724787771376323], [-2.530465390685069, 1.3392799285093415],
     [-2.581185674780456, -1.2849000403476156], [-0.7374018477096289, -2.5262830844194215],
     [0.9383937032311721, -2.0341826871379243]],
)
MOVEMENT_BALL_3 = (
    [[3.0, 3.0], [-2.2163188434767243, 4.481956133659721], [-4.9476512045107235, -0.7216284074948711]],
    [[0.0, 3.0], [-4.384392805374329, 0.831926038102395], [-3.4697198865423284, -3.6001449844322506]],
    [[1.0222524150130436, 1.0222524150130436], [1.0465304141462344, 1.0611721462519437],
     [1.053054922747061, 1.0891870834151538]],
)
SKEW3 = np.array([[0.0, 1.0, -2.0], [-1.0, 0.0, 0.5], [2.0, -0.5, 0.0]])
ENTROPY_SIMPLEX_3 = (
    [[0.5090064378070187, 0.4122520939120147, 0.07874146828096655],
     [0.2843542783818221, 0.6779488080267511, 0.03769691359142692],
     [0.15085807214797672, 0.7937217344320175, 0.05542019342000579]],
    [[0.41140918958905415, 0.49652193141876766, 0.09206887899217814],
     [0.25366571254996023, 0.6767223614683655, 0.06961192598167439],
     [0.1533797266323072, 0.7701852527714077, 0.07643502059628521]],
)
A2 = np.array([[1.0, 2.0], [-0.5, 3.0]])
M4 = np.block([[np.zeros((2, 2)), A2], [-A2.T, np.zeros((2, 2))]])
X04 = np.array([1.0, -2.0, 0.5, 1.5])
BOX4 = Box(-2 * np.ones(4), 2 * np.ones(4))
VECTOR_BOX_5 = (
    [[-2.0, -2.0, 2.0, -2.0], [0.3922014416069307, 0.45046668604492307, 0.05854931321169798, -2.0],
     [2.0, 1.3327034846075174, 0.7625294348100251, -1.3757218668814328],
     [2.0, 1.8492310528302458, 2.0, 0.48627084939718573],
     [0.28951671092812825, 0.9872225727526079, 2.0, 1.9690558979816681]],
    [[-0.29128468456647805, -0.7747666569775385, 0.6132495094369271, -2.0],
     [1.0219318959434405, 0.28116723550820516, 0.6744126098869139, -1.6878609334407164],
     [1.6825917070942342, 1.0697627581373514, 1.3509863795986823, -0.5881861724056531],
     [1.0188366001738152, 1.060111674890265, 1.8936204775863847, 0.6933214890640842],
     [-0.3942488356719621, 0.32090819753169614, 1.800959529871404, 1.2241657521116902]],
    [[2.9261749776799064, 5.71319744101322, 1.8027756377319946, 3.1622776601683795],
     [3.0829868135150518, 5.733777282305001, 1.8948492382716, 6.842472379031685],
     [3.233868778841077, 5.783981656143697, 1.9826092111646032, 7.443862612952604],
     [4.0757721579056065, 6.294665934079583, 1.9868100889970866, 7.484075910903448],
     [4.337115421967026, 6.676060597189767, 2.087266391472167, 8.064265652703629]],
)


def assert_traj(traj, xs, zs, steps=None, atol=1e-10):
    np.testing.assert_allclose(traj.xs[1:], xs, rtol=0, atol=atol)
    np.testing.assert_allclose(traj.zs[1:], zs, rtol=0, atol=atol)
    if steps is not None:
        np.testing.assert_allclose(traj.gammas[1:], steps, rtol=0, atol=atol)


# ---------------------------------------------------------------------------
# frozen oracle trajectories


def test_adapeg_matches_frozen_oracle():
    traj = run(SolverConfig("adapeg", eta=5.0, gamma0=1.0), ROT_OP, BALL5, 3, x0=X0)
    assert_traj(traj, *ADAPEG_BALL_3)


def test_adapeg_unbounded_matches_frozen_oracle():
    traj = run(SolverConfig("adapeg-unbounded", eta=3.0, gamma0=1.0), ROT_OP, FreeSpace(2), 5, x0=X0)
    assert_traj(traj, *ADAPEG_UNBOUNDED_FREE_5)


def test_adaeg_matches_frozen_oracle():
    traj = run(SolverConfig("adaeg", eta=5.0, gamma0=1.0), ROT_OP, BALL5, 5, x0=X0)
    assert_traj(traj, *ADAEG_BALL_5)


@pytest.mark.parametrize("alg, frozen", [("adapeg-peg", PEG_VARIANT_BALL_5),
                                         ("adapeg-optim", OPTIM_VARIANT_BALL_5)])
def test_variants_match_frozen_oracle(alg, frozen):
    traj = run(SolverConfig(alg, eta=5.0, gamma0=1.0), ROT_OP, BALL5, 5, x0=X0)
    assert_traj(traj, *frozen)


def test_movement_matches_frozen_oracle():
    traj = run(SolverConfig("movement", eta=5.0, gamma0=1.0, R_inf=10.0), ROT_OP, BALL5, 3, x0=X0)
    assert_traj(traj, *MOVEMENT_BALL_3)


def test_entropy_bregman_matches_frozen_oracle():
    traj = run(SolverConfig("adapeg-bregman", eta=1.0, gamma0=1.0, mirror="entropy"),
               LinearSkewOperator(SKEW3), Simplex(3), 3, x0=np.array([0.5, 0.3, 0.2]))
    assert_traj(traj, *ENTROPY_SIMPLEX_3)


def test_vector_on_box_matches_frozen_oracle():
    traj = run(SolverConfig("adapeg-vector", eta=2.0, gamma0=1.0), LinearSkewOperator(M4), BOX4, 5, x0=X04)
    assert_traj(traj, *VECTOR_BOX_5)


def test_entropy_prox_agrees_with_simplex_grid_oracle():
    from oracles import kl_composite, simplex_grid_argmin

    # first subproblem of the frozen trajectory, brute-forced on a 1e-3 grid
    s0 = np.array([0.5, 0.3, 0.2])
    fun, _, _ = kl_composite(SKEW3 @ s0, [(s0, 1.0)])
    grid = simplex_grid_argmin(fun, 3, 2e-3)
    np.testing.assert_allclose(ENTROPY_SIMPLEX_3[0][0], grid, atol=2e-3)


# ---------------------------------------------------------------------------
# live transcription checks on random instances


def _live_setup(seed, dim=6):
    inst = gen_bilinear(dim // 2, 3, seed)
    return inst, Ball(np.zeros(dim), inst.radius)


@pytest.mark.parametrize("alg, variant, two_call", [("adapeg", "main", False), ("adaeg", "main", True),
                                                    ("adapeg-peg", "peg", False),
                                                    ("adapeg-optim", "optim", False)])
@pytest.mark.parametrize("seed", [1, 2])
def test_scalar_algorithms_match_live_transcription(alg, variant, two_call, seed):
    inst, dom = _live_setup(seed)
    eta = inst.radius
    traj = run(SolverConfig(alg, eta=eta, gamma0=0.8), inst, dom, 8)
    xs, zs, gs = t_adapeg(inst.eval_full, region_of(dom), traj.x0, eta, 0.8, 8, variant, two_call)
    assert_traj(traj, xs, zs, gs, atol=1e-8)


@pytest.mark.parametrize("alg, two_call", [("adapeg-unbounded", False), ("adaeg-unbounded", True)])
@pytest.mark.parametrize("bounded", [True, False])
def test_unbounded_algorithms_match_live_transcription(alg, two_call, bounded):
    inst, dom = _live_setup(3)
    dom = dom if bounded else FreeSpace(6)
    traj = run(SolverConfig(alg, eta=2.0, gamma0=1.3), inst, dom, 8)
    xs, zs, gs = t_adapeg_unbounded(inst.eval_full, region_of(dom), traj.x0, 2.0, 1.3, 8, two_call)
    assert_traj(traj, xs, zs, gs, atol=1e-8)


@pytest.mark.parametrize("unbounded", [False, True])
def test_vector_algorithms_match_live_transcription(unbounded):
    inst = gen_bilinear(2, 3, 4)
    dom = Box(-np.ones(4), np.ones(4))
    alg = "adapeg-vector-unbounded" if unbounded else "adapeg-vector"
    traj = run(SolverConfig(alg, eta=2.0, gamma0=1.0), inst, dom, 8, x0=np.zeros(4))
    xs, zs, ds = t_adapeg_vector(inst.eval_full, region_of(dom), np.zeros(4), 2.0, 1.0, 8, unbounded)
    assert_traj(traj, xs, zs, ds, atol=1e-8)


def test_movement_matches_live_transcription():
    inst, dom = _live_setup(5)
    traj = run(SolverConfig("movement", gamma0=1.0), inst, dom, 8)
    xs, zs, ds = t_movement(inst.eval_full, region_of(dom), traj.x0, 1.0, traj.R_inf, 8)
    assert_traj(traj, xs, zs, ds, atol=1e-8)


@pytest.mark.parametrize("unbounded", [False, True])
def test_entropy_bregman_matches_live_transcription(unbounded):
    op = LinearSkewOperator(SKEW3)
    alg = "adapeg-bregman-unbounded" if unbounded else "adapeg-bregman"
    x0 = np.array([0.2, 0.3, 0.5])
    traj = run(SolverConfig(alg, eta=1.5, gamma0=1.0, mirror="entropy"), op, Simplex(3), 6, x0=x0)
    xs, zs = t_adapeg_entropy(op, x0, 1.5, 1.0, 6, unbounded)
    assert_traj(traj, xs, zs, atol=1e-8)


@pytest.mark.parametrize("alg, past", [("eg", False), ("peg", True)])
def test_baselines_match_live_transcription(alg, past):
    inst, dom = _live_setup(6)
    cfg = SolverConfig(alg, beta_hint=inst.beta, step_mode="decaying", decay_c=0.4)
    traj = run(cfg, inst, dom, 8)
    steps = [0.4 / math.sqrt(t) for t in range(1, 9)]
    xs, zs = t_eg(inst.eval_full, region_of(dom), traj.x0, steps, past)
    assert_traj(traj, xs, zs, atol=1e-8)


# ---------------------------------------------------------------------------
# trivial examples


@pytest.mark.parametrize("alg", sorted(ALGORITHMS))
def test_zero_operator_is_stationary(alg):
    dim = 3
    domain = Simplex(dim) if alg.startswith("adapeg-bregman") else Ball(np.zeros(dim), 2.0)
    x0 = np.full(dim, 1.0 / dim)
    mirror = "entropy" if alg.startswith("adapeg-bregman") else "euclidean"
    cfg = SolverConfig(alg, eta=1.0, gamma0=1.0, beta_hint=1.0, mirror=mirror)
    traj = run(cfg, zero_operator(dim), domain, 20, x0=x0)
    np.testing.assert_allclose(traj.xs, np.tile(x0, (21, 1)), atol=1e-15)
    np.testing.assert_allclose(traj.zs, np.tile(x0, (21, 1)), atol=1e-15)
    if ALGORITHMS[alg].metric == "scalar":
        assert np.all(traj.gammas == 1.0)
    elif ALGORITHMS[alg].metric in ("vector", "movement"):
        assert np.all(traj.gammas == 1.0)


def test_step_size_formula_direct_arithmetic():
    # eta = 2, gamma0 = 1, ||dF||^2 = 12  ->  gamma_1 = sqrt(4 + 12) / 2 = 2
    fixed = np.array([2.0, 2.0, 2.0])  # F(x1) - F(x0) = (2, 2, 2), squared norm 12

    class Jump:
        n = None
        dim = 3

        def __call__(self, x):
            return np.zeros(3) if np.all(x == 0) else fixed

    state = init_state(SolverConfig("adapeg", eta=2.0, gamma0=1.0), FreeSpace(3), StochasticOracle(Jump()),
                       np.zeros(3))
    # x1 = -0/1 = 0 would keep F at 0; start off-origin instead
    state.x = state.z = np.ones(3)
    state.grad = np.zeros(3)
    adapeg_step(state, FreeSpace(3), StochasticOracle(Jump()))
    assert state.gamma == 2.0


def test_unbounded_first_step_anchors_collapse_to_x0():
    cfg = SolverConfig("adapeg-unbounded", eta=3.0, gamma0=2.0)
    traj = run(cfg, ROT_OP, FreeSpace(2), 1, x0=X0)
    np.testing.assert_allclose(traj.xs[1], X0 - ROT @ X0 / 2.0, atol=1e-15)


def test_one_and_two_call_share_first_iterate():
    inst = gen_bilinear(5, 3, 4)
    dom = Ball(np.zeros(10), inst.radius)
    a = run(SolverConfig("adapeg", eta=inst.radius), inst, dom, 1)
    b = run(SolverConfig("adaeg", eta=inst.radius), inst, dom, 1)
    assert np.array_equal(a.xs[1], b.xs[1])


def test_bregman_euclidean_is_bit_identical_to_adapeg():
    inst = gen_bilinear(4, 2, 9)
    dom = Ball(np.zeros(8), inst.radius)
    a = run(SolverConfig("adapeg", eta=3.0), inst, dom, 200)
    b = run(SolverConfig("adapeg-bregman", eta=3.0, mirror="euclidean"), inst, dom, 200)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.zs, b.zs)


def test_bregman_rejects_incompatible_mirror():
    state = init_state(SolverConfig("adapeg", eta=1.0), BALL5, StochasticOracle(ROT_OP), X0)
    with pytest.raises(ConfigurationError):
        adapeg_bregman_step(state, BALL5, MirrorMap("entropy"), StochasticOracle(ROT_OP))
    with pytest.raises(ConfigurationError):
        run(SolverConfig("adapeg-bregman", mirror="entropy"), ROT_OP, BALL5, 3, x0=X0)


def test_vector_in_one_dimension_equals_scalar():
    op = LinearSkewOperator(np.array([[[0.0]], [[0.0]]]) + 0.0)
    # a 1-dim monotone operator: F(x) = 2 x (symmetric PSD is monotone)
    from vi_solve.core import CallbackOperator

    op = CallbackOperator(lambda x: 2.0 * x, 1)
    dom = Ball(np.zeros(1), 3.0)
    a = run(SolverConfig("adapeg", eta=3.0, gamma0=0.5), op, dom, 50, x0=np.array([2.0]))
    b = run(SolverConfig("adapeg-vector", eta=3.0, gamma0=0.5), op, dom, 50, x0=np.array([2.0]))
    np.testing.assert_allclose(a.xs, b.xs, atol=1e-13)
    np.testing.assert_allclose(a.gammas, b.gammas[:, 0], atol=1e-13)


def test_vector_untouched_coordinates_keep_initial_metric():
    from vi_solve.core import CallbackOperator

    op = CallbackOperator(lambda x: np.array([x[0], 0.0, 0.0]), 3)
    traj = run(SolverConfig("adapeg-vector", eta=1.0, gamma0=0.7), op, Ball(np.zeros(3), 2.0), 30,
               x0=np.array([1.0, 0.5, -0.5]))
    assert np.all(traj.gammas[:, 1:] == 0.7)
    assert traj.gammas[-1, 0] > 0.7


def test_movement_zero_movement_keeps_metric():
    state = init_state(SolverConfig("movement", gamma0=1.5, R_inf=2.0), BALL5,
                       StochasticOracle(zero_operator(2)), X0)
    single_call_movement_step(state, BALL5, StochasticOracle(zero_operator(2)))
    assert np.all(state.diag == 1.5)


def test_movement_factor_sqrt2_on_full_movement():
    # (x - z_{t-1})^2 + (x - z_t)^2 = 2 R_inf^2 in coordinate 0 gives sqrt(2) growth
    from vi_solve.core import CallbackOperator

    R_inf = 1.0
    op = CallbackOperator(lambda x: np.array([-1.0, 0.0]), 2)
    box = Box(np.array([-10.0, -10.0]), np.array([10.0, 10.0]))
    state = init_state(SolverConfig("movement", gamma0=1.0, R_inf=R_inf), box, StochasticOracle(op),
                       np.zeros(2))
    single_call_movement_step(state, box, StochasticOracle(op))
    # x_1 = z_0 + 1, z_1 = z_0 + 1 -> movements 1 and 0; rescale to hit exactly 2 R^2
    a = state.x - np.zeros(2)
    b = state.x - state.z
    assert a[0] ** 2 + b[0] ** 2 == 1.0
    state2 = init_state(SolverConfig("movement", gamma0=1.0, R_inf=math.sqrt(0.5)), box,
                        StochasticOracle(op), np.zeros(2))
    single_call_movement_step(state2, box, StochasticOracle(op))
    assert state2.diag[0] == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert state2.diag[1] == 1.0


def test_eg_free_space_single_iteration_unrolled():
    eta = 0.3
    traj = run(SolverConfig("eg", step=eta), ROT_OP, FreeSpace(2), 1, x0=X0)
    x1 = X0 - eta * ROT @ X0
    z1 = X0 - eta * ROT @ x1
    np.testing.assert_array_equal(traj.xs[1], x1)
    np.testing.assert_array_equal(traj.zs[1], z1)


def test_eg_contracts_on_bilinear():
    # M^2 = -I, so z_{t+1} = ((1 - eta^2) I - eta M) z_t with norm factor < 1 for 0 < eta < 1
    traj = run(SolverConfig("eg", step=0.5), ROT_OP, FreeSpace(2), 100, x0=X0)
    norms = np.linalg.norm(traj.zs, axis=1)
    assert np.all(np.diff(norms) < 0)


def test_eg_constant_mode_requires_beta_hint():
    with pytest.raises(ConfigurationError):
        run(SolverConfig("eg"), ROT_OP, BALL5, 2, x0=X0)
    with pytest.raises(ConfigurationError):
        run(SolverConfig("peg", step_mode="decaying"), ROT_OP, BALL5, 2, x0=X0)
    with pytest.raises(ConfigurationError):
        eg_step(init_state(SolverConfig("eg", step=1.0), BALL5, StochasticOracle(ROT_OP), X0), BALL5,
                StochasticOracle(ROT_OP), 0.0)


def test_baseline_step_sizes():
    assert baseline_step_size(SolverConfig("eg", beta_hint=4.0), 7) == 0.25
    assert baseline_step_size(SolverConfig("peg", beta_hint=4.0), 7) == 0.125
    assert baseline_step_size(SolverConfig("peg", step_mode="decaying", decay_c=2.0), 4) == 1.0


def test_optim_variant_free_space_recursion():
    # x_{t+1} = x_t - (2/gamma_t) F(x_t) + (1/gamma_{t-1}) F(x_{t-1})
    traj = run(SolverConfig("adapeg-optim", eta=2.0, gamma0=1.5), ROT_OP, FreeSpace(2), 6, x0=X0)
    for t in range(1, 6):
        pred = traj.xs[t] - 2.0 / traj.gammas[t] * traj.grads[t] + traj.grads[t - 1] / traj.gammas[t - 1]
        np.testing.assert_allclose(traj.xs[t + 1], pred, rtol=0, atol=1e-14)


def test_variants_coincide_when_step_size_is_constant():
    # F constant: differences vanish after the first query, gamma never grows
    from vi_solve.core import CallbackOperator

    op = CallbackOperator(lambda x: np.array([0.3, -0.2]), 2)
    runs = [run(SolverConfig(a, eta=1.0, gamma0=2.0), op, BALL5, 10, x0=np.zeros(2))
            for a in ("adapeg", "adapeg-peg", "adapeg-optim")]
    for other in runs[1:]:
        np.testing.assert_array_equal(runs[0].xs, other.xs)
        np.testing.assert_array_equal(runs[0].zs, other.zs)


# ---------------------------------------------------------------------------
# configuration errors


def test_gamma0_zero_rules():
    with pytest.raises(ConfigurationError):
        run(SolverConfig("adapeg-unbounded", gamma0=0.0), ROT_OP, BALL5, 2, x0=X0)
    with pytest.raises(ConfigurationError):
        run(SolverConfig("movement", gamma0=0.0), ROT_OP, BALL5, 2, x0=X0)
    with pytest.raises(ConfigurationError):
        run(SolverConfig("adapeg", gamma0=0.0), ROT_OP, FreeSpace(2), 2, x0=X0)
    with pytest.raises(ConfigurationError):
        run(SolverConfig("adapeg", eta=0.0), ROT_OP, BALL5, 2, x0=X0)
    # bounded domain and gamma0 = 0: first subproblem is linear
    traj = run(SolverConfig("adapeg", eta=5.0, gamma0=0.0), ROT_OP, BALL5, 3, x0=X0)
    np.testing.assert_allclose(traj.xs[1], [0.0, 5.0], atol=1e-15)


def test_zero_weight_on_free_space_raises_unbounded_subproblem():
    state = init_state(SolverConfig("adapeg", eta=1.0, gamma0=1.0), BALL5, StochasticOracle(ROT_OP), X0)
    state.gamma = 0.0
    with pytest.raises(UnboundedSubproblemError):
        adapeg_step(state, FreeSpace(2), StochasticOracle(ROT_OP))


def test_x0_outside_domain_rejected():
    with pytest.raises(ConfigurationError):
        run(SolverConfig("adapeg"), ROT_OP, Ball(np.zeros(2), 1.0), 2, x0=X0)
    with pytest.raises(ConfigurationError):
        run(SolverConfig("adapeg"), ROT_OP, BALL5, 0, x0=X0)
    with pytest.raises(ConfigurationError):
        SolverConfig("nope").info


def test_movement_needs_bounded_domain():
    with pytest.raises(ConfigurationError):
        run(SolverConfig("movement"), ROT_OP, FreeSpace(2), 2, x0=X0)


# ---------------------------------------------------------------------------
# run contract


@pytest.mark.parametrize("alg, expected", [("adapeg", 101), ("adaeg", 200), ("eg", 200), ("peg", 101),
                                           ("movement", 101), ("adapeg-vector", 101)])
def test_oracle_query_counts(alg, expected):
    cfg = SolverConfig(alg, eta=5.0, beta_hint=1.0)
    traj = run(cfg, ROT_OP, BALL5, 100, x0=X0)
    assert traj.queries == expected
    assert traj.query_counts[-1] == expected


def test_T1_average_is_first_iterate():
    traj = run(SolverConfig("adapeg", eta=5.0), ROT_OP, BALL5, 1, x0=X0)
    np.testing.assert_array_equal(traj.x_bar, traj.xs[1])


def test_run_is_deterministic_with_minibatches():
    inst = gen_bilinear(4, 20, 3)
    a = run(SolverConfig("adapeg-unbounded", eta=5.0), inst, FreeSpace(8), 300, seed=11, minibatch_size=4)
    b = run(SolverConfig("adapeg-unbounded", eta=5.0), inst, FreeSpace(8), 300, seed=11, minibatch_size=4)
    for name in ("xs", "zs", "grads", "gammas", "x_bar"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    c = run(SolverConfig("adapeg-unbounded", eta=5.0), inst, FreeSpace(8), 300, seed=12, minibatch_size=4)
    assert not np.array_equal(a.xs, c.xs)


def test_x_bar_prefix_matches_x_bar_at():
    traj = run(SolverConfig("adapeg", eta=5.0), ROT_OP, BALL5, 30, x0=X0)
    prefix = traj.x_bar_prefix()
    for t in (1, 7, 30):
        np.testing.assert_allclose(prefix[t - 1], traj.x_bar_at(t), rtol=1e-15, atol=1e-15)
    np.testing.assert_allclose(traj.x_bar, traj.x_bar_at(30), rtol=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), alg=st.sampled_from(sorted(a for a in ALGORITHMS if "bregman" not in a)))
def test_iterates_feasible_and_step_sizes_monotone(seed, alg):
    inst = gen_bilinear(3, 4, seed)
    dom = Ball(np.zeros(6), inst.radius)
    traj = run(SolverConfig(alg, eta=inst.radius, gamma0=1.0, beta_hint=inst.beta), inst, dom, 60,
               seed=seed, minibatch_size=2)
    for p in np.vstack([traj.xs, traj.zs]):
        assert dom.contains(p, tol=1e-10)
    if ALGORITHMS[alg].metric != "fixed":
        g = traj.gammas
        assert np.all(np.diff(g, axis=0) >= 0)
        assert np.all(g >= 1.0)


def test_scalar_step_size_identity_holds_exactly():
    inst = gen_bilinear(4, 3, 2)
    dom = Ball(np.zeros(8), inst.radius)
    eta, g0 = 7.0, 0.3
    traj = run(SolverConfig("adapeg", eta=eta, gamma0=g0), inst, dom, 100)
    sq = 0.0
    for t in range(1, 101):
        d = traj.grads[t] - traj.extraps[t]
        sq += float(d @ d)
        assert traj.gammas[t] == math.sqrt(eta * eta * g0 * g0 + sq) / eta


def test_stepper_registry_is_complete():
    assert set(STEPPERS) == set(ALGORITHMS)


# ---------------------------------------------------------------------------
# Adam-style optimizer


def test_adam_zero_gradients_never_move():
    theta = np.array([1.0, -2.0])
    mom = AdamMoments.zeros_like(theta)
    cfg = AdamConfig(lr=0.1)
    for t in range(1, 20):
        theta2, mom = adapeg_adam_step(theta, np.zeros(2), mom, cfg, t)
        assert np.array_equal(theta2, theta)


def test_adam_beta_zero_hand_expanded():
    eta, eps = 0.1, 1e-8
    cfg = AdamConfig(lr=eta, beta1=0.0, beta2=0.0, eps=eps)
    theta1 = np.array([0.5])
    mom = AdamMoments.zeros_like(theta1)
    theta2, mom = adapeg_adam_step(theta1, np.array([1.0]), mom, cfg, 1)
    # m1 = 1, v1 = 1, lag term 0
    assert abs(theta2[0] - (0.5 - 2 * eta * 1.0 / (1.0 + eps))) <= 1e-14
    theta3, mom = adapeg_adam_step(theta2, np.array([3.0]), mom, cfg, 2)
    # m2 = 3, v2 = (3 - 1)^2 = 4
    expected = theta2[0] - 2 * eta * 3.0 / (2.0 + eps) + eta * 1.0 / (1.0 + eps)
    assert abs(theta3[0] - expected) <= 1e-14


def test_adam_constant_gradient_matches_transcription():
    cfg = AdamConfig(lr=0.01, beta1=0.5, beta2=0.9, eps=1e-8)
    grads = [np.array([0.7])] * 8
    expected = t_adam(grads, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, np.array([1.0]))
    theta = np.array([1.0])
    mom = AdamMoments.zeros_like(theta)
    v_hist = []
    for t, g in enumerate(grads, start=1):
        theta, mom = adapeg_adam_step(theta, g, mom, cfg, t)
        v_hist.append(mom.v[0])
        assert abs(theta[0] - expected[t - 1][0]) <= 1e-14
    # after the first step the differences vanish and v decays geometrically
    for t in range(1, len(v_hist)):
        assert v_hist[t] == pytest.approx(cfg.beta2 * v_hist[t - 1], rel=1e-15)


def test_adam_shape_and_determinism():
    rng = np.random.default_rng(0)
    params = rng.standard_normal((3, 4))
    grads = rng.standard_normal((5, 3, 4))
    cfg = AdamConfig()
    outs = []
    for _ in range(2):
        p, mom = params.copy(), AdamMoments.zeros_like(params)
        for t, g in enumerate(grads, start=1):
            p, mom = adapeg_adam_step(p, g, mom, cfg, t)
        outs.append(p)
    assert outs[0].shape == params.shape
    assert np.array_equal(outs[0], outs[1])


@pytest.mark.parametrize("kw", [{"beta1": 1.0}, {"beta2": -0.1}, {"lr": 0.0}])
def test_adam_rejects_bad_config(kw):
    with pytest.raises(ConfigurationError):
        AdamConfig(**kw)


def test_adam_rejects_t_zero():
    with pytest.raises(ConfigurationError):
        adapeg_adam_step(np.zeros(1), np.zeros(1), AdamMoments.zeros_like(np.zeros(1)), AdamConfig(), 0)
