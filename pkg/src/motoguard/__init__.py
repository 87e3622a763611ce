"""Face, passcode and SMS gated engine ignition with GPS theft alerts, as a deterministic simulator."""

from .controller import ControllerConfig, ControllerState, Mode, init, step
from .facerec import FaceDb, FaceTemplate, Match, NoMatch, enroll, extract_template, identify, lbp_map
from .geo import GeoFix, MovementMonitor, haversine_m, monitor_update, nmea_checksum, parse_nmea
from .imaging import GrayImage, RgbImage, load_pgm, load_ppm, rgb_to_gray, save_pgm
from .simcli import cli_main, parse_scenario, run_scenario, upload_stub

__version__ = "0.1.0"
