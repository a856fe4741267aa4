"""evertip: a desk-scale simulator and design calculator for a
tendon-steered continuum tip riding on a pneumatic eversion robot.

The pieces line up with the hardware they model:

  mechcalc    spring/servo design arithmetic and feasibility reports
  kinematics  the 6-disc continuum tip: bends, tendons, servo angles
  eversion    pressure-driven growth with the fixed-wall ledger
  network     pipe graphs, junction selection, the robot's path
  spray       cone tests and the 6 x 10 coverage grid
  scene       scene files (pipescene JSON)
  simulator   the deterministic fixed-tick engine
  scenario    scripted runs (pipescript JSON) and success predicates
  session     run logs, config hashing, record/replay
  gateway     TCP + WebSocket teleoperation server
  presets     built-in scenes, scripts and design inputs
"""

from .eversion import EversionState, growth_step, pressure_step, retract_state
from .kinematics import (
    BendCommand,
    TipGeometry,
    forward_tip_pose,
    joystick_to_bend,
    solve_continuum,
    tendon_displacements,
)
from .mechcalc import (
    SERVO_CATALOG,
    SPRING_304,
    ActuationRequirement,
    ServoSpec,
    SpoolSpec,
    SpringSpec,
    required_torque,
    servo_feasibility,
    shear_modulus,
    spool_travel,
    spring_constant,
    spring_force,
    stall_torque_si,
)
from .network import PipeNetwork, RobotPath, advance_along_network, start_path
from .scenario import ScenarioScript, load_script, run_scenario
from .scene import Scene, SceneError, load_scene
from .session import replay
from .simulator import NoiseModel, SimConfig, Simulator, retract
from .spray import CoverageReport, SpraySpec, TargetGrid, coverage_stats, spray_hits

__version__ = "0.1.0"

__all__ = [
    "ActuationRequirement",
    "BendCommand",
    "CoverageReport",
    "EversionState",
    "NoiseModel",
    "PipeNetwork",
    "RobotPath",
    "SERVO_CATALOG",
    "SPRING_304",
    "ScenarioScript",
    "Scene",
    "SceneError",
    "ServoSpec",
    "SimConfig",
    "Simulator",
    "SpoolSpec",
    "SpraySpec",
    "SpringSpec",
    "TargetGrid",
    "TipGeometry",
    "advance_along_network",
    "coverage_stats",
    "forward_tip_pose",
    "growth_step",
    "joystick_to_bend",
    "load_scene",
    "load_script",
    "pressure_step",
    "replay",
    "required_torque",
    "retract",
    "retract_state",
    "run_scenario",
    "servo_feasibility",
    "shear_modulus",
    "solve_continuum",
    "spool_travel",
    "spray_hits",
    "spring_constant",
    "spring_force",
    "stall_torque_si",
    "start_path",
    "tendon_displacements",
    "__version__",
]
