"""
Verification suite - closed-form vs Monte-Carlo, martingale and rate-consistency checks
"""
import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..config.schema import RunConfig, Tolerances
from ..dynamics.euler import bond_euler
from ..lrb.bridge import Measure, simulate
from ..models.factors import FactorKind
from ..models.quadrature import HeatKernelSpec, Y_quadrature
from ..pricing.bonds import bond_bounds, bond_price, short_rate
from ..pricing.monte_carlo import InstrumentKind, mc_price
from ..pricing.options import CLOSED_FORM_KINDS, caplet_price, swaption_price
from ..scenario.contagion import contagion_model, run_scenario
from ..utils.errors import HeatKernelError

logger = logging.getLogger(__name__)

# martingale and rate checks look at times in (0, 0.4U]; exp-quadratic A has infinite variance from U/2
CHECK_TIMES = np.linspace(0.04, 0.4, 10)
RATE_PATHS = 1000
QUADRATURE_MATURITIES = np.array([0.1, 0.5, 0.9])
EULER_STEPS = 800


class VerifySuite:
    """Runs the checks that apply to a configuration and collects one record per check"""

    def __init__(self, config: RunConfig, tolerances: Tolerances, workers: Optional[int] = None):
        self.config = config
        self.tol = tolerances
        self.workers = workers
        self.results: List[Dict[str, Any]] = []

    def record(self, name: str, statistic: float, threshold: float, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        logger.info(f"{status} {name}: statistic={statistic:.6g} threshold={threshold:.6g} {detail}".rstrip())
        self.results.append({
            "name": name,
            "statistic": float(statistic),
            "threshold": float(threshold),
            "passed": bool(passed),
            "detail": detail,
        })

    def guarded(self, name: str, check: Callable[[], None]) -> None:
        """A check that raises is a failed check"""
        try:
            check()
        except HeatKernelError as e:
            logger.error(f"Check {name} raised: {e}")
            self.results.append({
                "name": name,
                "statistic": float("nan"),
                "threshold": float("nan"),
                "passed": False,
                "detail": f"{type(e).__name__}: {e}",
            })

    def _seed(self, offset: int) -> int:
        return (self.config.seed + offset) % 2**64

    # bond model checks

    def check_calibration(self) -> None:
        model, curve = self.config.bond_model, self.config.curve
        horizon = self.config.horizon
        zero = np.zeros(self.config.bridge.dimension)
        grid = np.linspace(0.0, horizon * 0.98, 50)
        gap = max(abs(float(bond_price(model, 0.0, T, zero)) - float(curve(T))) for T in grid)
        self.record("calibration", gap, self.tol.calibration, gap < self.tol.calibration,
                    "max |P_0T - market| on 50 maturities")

    def check_martingale(self) -> None:
        factor, bridge = self.config.factor, self.config.bridge
        times = CHECK_TIMES * self.config.horizon
        batch = simulate(bridge, times, self.config.n_paths, self.config.seed, factor.measure, workers=self.workers)
        worst = 0.0
        for k, t in enumerate(batch.grid[1:], start=1):
            A = factor.A(t, batch.states(k))
            se = np.std(A, ddof=1) / np.sqrt(A.size)
            worst = max(worst, abs(float(np.mean(A))) / se if se > 0 else abs(float(np.mean(A))))
        self.record("martingale", worst, self.tol.loop_sigmas, worst < self.tol.loop_sigmas,
                    f"max |mean A_t| / SE under {factor.measure.value} at {times.size} times")

    def _states(self):
        times = CHECK_TIMES * self.config.horizon
        n = min(self.config.n_paths, RATE_PATHS)
        return simulate(self.config.bridge, times, n, self._seed(1), Measure.P, workers=self.workers)

    def check_short_rate(self) -> None:
        model = self.config.bond_model
        h = 1e-5 * self.config.horizon
        batch = self._states()
        worst = 0.0
        for k, t in enumerate(batch.grid[1:], start=1):
            states = batch.states(k)
            r = short_rate(model, t, states)
            fd = -(np.log(model.numerator(t + h, t, states)) - np.log(model.numerator(t - h, t, states))) / (2 * h)
            worst = max(worst, float(np.max(np.abs(r - fd) / np.maximum(np.abs(r), 1e-6))))
        self.record("short_rate", worst, self.tol.rate_rel, worst < self.tol.rate_rel,
                    "relative gap to -d/dT ln P_tT at T = t")

    def check_positivity(self) -> None:
        model = self.config.bond_model
        batch = self._states()
        horizon = self.config.horizon
        lowest = np.inf
        for k, t in enumerate(batch.grid[1:], start=1):
            for T in (t, 0.5 * (t + horizon), 0.95 * horizon):
                lowest = min(lowest, float(np.min(model.numerator(T, t, batch.states(k)))))
        self.record("positivity", lowest, 0.0, lowest > 0, "min of P0(T) + b(T) A_t over P-paths")

    def check_instrument(self, instrument) -> None:
        model = self.config.bond_model
        factor = self.config.factor
        if instrument.kind == InstrumentKind.BOND:
            exact = float(model.curve(instrument.T))
        elif factor.kind not in CLOSED_FORM_KINDS:
            logger.info(f"No closed form for {instrument.id} under {factor.kind.value}; skipped")
            return
        elif instrument.kind == InstrumentKind.CAPLET:
            exact = caplet_price(model, instrument.K, instrument.t, instrument.T)
        else:
            exact = swaption_price(model, instrument.K, instrument.t, instrument.resets)
        estimate, se = mc_price(instrument, model, self.config.n_paths, self.config.seed, workers=self.workers)
        z = abs(exact - estimate) / se if se > 0 else abs(exact - estimate) / 1e-12
        self.record(f"closed_form:{instrument.id}", z, self.tol.mc_sigmas, z < self.tol.mc_sigmas,
                    f"closed={exact:.10g} mc={estimate:.10g} se={se:.3g}")

    def check_quadrature(self) -> None:
        factor = self.config.factor
        spec = HeatKernelSpec.from_factor(factor, self.config.bridge, self.config.functions)
        zero = np.zeros(self.config.bridge.dimension)
        worst = 0.0
        for T in QUADRATURE_MATURITIES * self.config.horizon:
            exact = float(factor.y0(T))
            worst = max(worst, abs(Y_quadrature(spec, 0.0, T, zero) - exact) / abs(exact))
        self.record("quadrature", worst, self.tol.quadrature_rel, worst < self.tol.quadrature_rel,
                    "relative gap of Y_0T by quadrature to the closed form")

    def check_euler(self) -> None:
        horizon = self.config.horizon
        grid = np.linspace(0.0, 0.4 * horizon, EULER_STEPS + 1)
        n = min(self.config.n_paths, RATE_PATHS)
        batch = simulate(self.config.bridge, grid, n, self._seed(2), Measure.P, workers=self.workers)
        euler, exact = bond_euler(self.config.bond_model, 0.5 * horizon, batch)
        rms = float(np.sqrt(np.mean(((euler[:, -1] - exact[:, -1]) / exact[:, -1]) ** 2)))
        self.record("euler", rms, self.tol.euler_rms, rms < self.tol.euler_rms,
                    f"RMS relative gap of the Euler bond path at t=0.4U, dt=U/{int(EULER_STEPS / 0.4)}")

    # scenario checks

    def check_scenario(self) -> None:
        scenario = self.config.scenario
        first = run_scenario(scenario, workers=1)
        base = first[first["country"] == scenario.base_country]
        spread = float(np.max(np.abs(base["s"].to_numpy())))
        self.record("base_spread", spread, 0.0, spread == 0.0, f"spread of {scenario.base_country}")

        second = run_scenario(scenario, workers=max(2, self.workers or 1))
        same = first.equals(second)
        self.record("determinism", 0.0 if same else 1.0, 0.0, same, "identical frames for 1 and n workers")

        worst = 0.0
        for j, name in enumerate(scenario.names):
            model = contagion_model(scenario, j)
            rows = first[first["country"] == name]
            for t, price in zip(rows["t"].to_numpy(), rows["P"].to_numpy()):
                if t >= scenario.maturity:
                    continue
                low, high = bond_bounds(model, float(t), scenario.maturity)
                worst = max(worst, low - price, price - high)
        self.record("bond_bounds", worst, 1e-12, worst <= 1e-12, "largest excursion outside the analytic bounds")

    def run(self) -> Dict[str, Any]:
        config = self.config
        if config.bond_model is not None:
            if config.source.model.calibrate:
                self.guarded("calibration", self.check_calibration)
            self.guarded("martingale", self.check_martingale)
            self.guarded("short_rate", self.check_short_rate)
            self.guarded("positivity", self.check_positivity)
            if config.factor.kind != FactorKind.EXP_QUADRATIC:
                self.guarded("quadrature", self.check_quadrature)
            if config.factor.gaussian:
                self.guarded("euler", self.check_euler)
            for instrument in config.instruments:
                self.guarded(f"closed_form:{instrument.id}", lambda i=instrument: self.check_instrument(i))
        if config.scenario is not None:
            self.guarded("scenario", self.check_scenario)
        passed = bool(self.results) and all(r["passed"] for r in self.results)
        return {
            "config": str(config.path) if config.path else config.source.name,
            "seed": config.seed,
            "n_paths": config.n_paths,
            "tolerances": self.tol.model_dump(),
            "checks": self.results,
            "passed": passed,
        }


def run_checks(config: RunConfig, tolerances: Tolerances, workers: Optional[int] = None) -> Dict[str, Any]:
    return VerifySuite(config, tolerances, workers).run()


def summarize(report: Dict[str, Any]) -> str:
    """Human-readable summary of a verify report"""
    lines = [f"verify {report['config']} (seed {report['seed']}, {report['n_paths']} paths)"]
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        lines.append(f"  {status}  {check['name']:<28} {check['statistic']:.6g} (threshold {check['threshold']:.6g})")
    failed = sum(not c["passed"] for c in report["checks"])
    lines.append(f"{len(report['checks']) - failed} passed, {failed} failed")
    return "\n".join(lines)
