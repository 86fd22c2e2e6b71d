"""Statistical complexity of PoW, PoS and hybrid block production."""
from .entropy import (EpsilonMachine, InvalidMachineError, binary_shannon_entropy,
                      pade_log1m, stable_one_minus_term, statistical_complexity)
from .pow import (CurrencyParams, Protocol, broadcast_probability, difficulty_to_target,
                  expected_hashes_per_block, pow_complexity)
from .nxt import (BaseTargetState, ForgingAccount, NxtConstants, account_target, can_forge,
                  compute_hit, effective_balance, forge_wait_time, load_constants,
                  make_account, nxt_complexity, retarget_base)
from .coinage import (CoinstakeRecord, WalletOutput, coin_age, consume_coin_age,
                      continuous_retarget, expected_kernel_time, hybrid_complexity,
                      kernel_target)
from .sim import (SimulationReport, empirical_complexity, simulate_coinage_kernel,
                  simulate_nxt_forging, simulate_pow, stake_share_estimate)

__version__ = "0.1.0"
