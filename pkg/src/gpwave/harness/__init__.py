from .compare import ComparisonReport, compare
from .config import ConfigError, RunConfig, load_config
from .convergence import estimate_orders, residual_ladder, rk4_ladder, strang_ladder
from .runner import run

__all__ = ["ComparisonReport", "compare", "ConfigError", "RunConfig", "load_config",
           "estimate_orders", "residual_ladder", "rk4_ladder", "strang_ladder", "run"]
