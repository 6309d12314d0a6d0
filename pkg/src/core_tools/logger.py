"""
Centralized Logging Utility for the Hartree wave lab.
Provides structured, color-coded logging with timestamps, run ids and levels.
Log lines go to stderr so artifact streams written to stdout stay clean.
"""

import sys
import traceback
from datetime import datetime
from enum import Enum
from typing import Any, Optional


class LogLevel(Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    SUCCESS = "SUCCESS"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


LEVEL_ORDER = {
    LogLevel.DEBUG: 10,
    LogLevel.INFO: 20,
    LogLevel.SUCCESS: 25,
    LogLevel.WARNING: 30,
    LogLevel.ERROR: 40,
    LogLevel.CRITICAL: 50,
}


class Colors:
    """ANSI color codes for terminal output."""
    RESET = "\033[0m"
    BOLD = "\033[1m"
    DIM = "\033[2m"

    RED = "\033[31m"
    CYAN = "\033[36m"
    WHITE = "\033[37m"

    BRIGHT_RED = "\033[91m"
    BRIGHT_GREEN = "\033[92m"
    BRIGHT_YELLOW = "\033[93m"
    BRIGHT_BLUE = "\033[94m"
    BRIGHT_CYAN = "\033[96m"

    BG_RED = "\033[41m"


LEVEL_COLORS = {
    LogLevel.DEBUG: Colors.DIM + Colors.WHITE,
    LogLevel.INFO: Colors.BRIGHT_BLUE,
    LogLevel.SUCCESS: Colors.BRIGHT_GREEN,
    LogLevel.WARNING: Colors.BRIGHT_YELLOW,
    LogLevel.ERROR: Colors.BRIGHT_RED,
    LogLevel.CRITICAL: Colors.BOLD + Colors.BG_RED + Colors.WHITE,
}

LEVEL_SYMBOLS = {
    LogLevel.DEBUG: "🔍",
    LogLevel.INFO: "ℹ️ ",
    LogLevel.SUCCESS: "✅",
    LogLevel.WARNING: "⚠️ ",
    LogLevel.ERROR: "❌",
    LogLevel.CRITICAL: "🚨",
}

# Shared threshold, updated once from LabSettings by the CLI.
_THRESHOLD = {"level": LogLevel.INFO, "use_colors": True}


def configure_logging(level: str = "INFO", use_colors: bool = True):
    """Set the process-wide level threshold and color preference."""
    _THRESHOLD["level"] = LogLevel(level.upper())
    _THRESHOLD["use_colors"] = use_colors


def _render_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class LabLogger:
    """
    Logger for lab components with structured output.

    Usage:
        logger = LabLogger("WaveDynamics")
        logger.info("Integrating flow", data={"N": 16, "h": 0.01})
        logger.success("Flow finished", data={"steps": 100})
        logger.error("Grid too small", error=exception)
    """

    def __init__(self, component: str, use_emojis: bool = True, stream=None):
        """
        Initialize the component logger.

        Args:
            component: Name of the component (e.g., "CountingLab")
            use_emojis: Whether to prefix lines with level symbols
            stream: Output stream, stderr by default
        """
        self.component = component
        self.use_emojis = use_emojis
        self.stream = stream
        self.run_id: Optional[str] = None
        self.step_count = 0

    @property
    def _out(self):
        return self.stream if self.stream is not None else sys.stderr

    @property
    def use_colors(self) -> bool:
        return _THRESHOLD["use_colors"] and hasattr(self._out, "isatty") and self._out.isatty()

    def set_run_id(self, run_id: str):
        """Set the current run ID for context."""
        self.run_id = run_id
        self.step_count = 0

    def _enabled(self, level: LogLevel) -> bool:
        return LEVEL_ORDER[level] >= LEVEL_ORDER[_THRESHOLD["level"]]

    def _format_message(
        self,
        level: LogLevel,
        message: str,
        data: Optional[dict] = None,
        step: Optional[str] = None,
    ) -> str:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        prefix_parts = [f"[{timestamp}]"]
        if self.use_emojis:
            prefix_parts.append(LEVEL_SYMBOLS[level])
        prefix_parts.append(f"[{level.value:8}]")
        prefix_parts.append(f"[{self.component}]")
        if self.run_id:
            prefix_parts.append(f"[{self.run_id}]")
        if step:
            prefix_parts.append(f"[Step: {step}]")
        prefix = " ".join(prefix_parts)

        if self.use_colors:
            prefix = f"{LEVEL_COLORS[level]}{prefix}{Colors.RESET}"

        full_message = f"{prefix} {message}"
        if data:
            data_str = ", ".join(f"{k}={_render_value(v)}" for k, v in data.items())
            if self.use_colors:
                full_message += f" {Colors.DIM}({data_str}){Colors.RESET}"
            else:
                full_message += f" ({data_str})"
        return full_message

    def _emit(self, text: str):
        print(text, file=self._out)

    def _log(
        self,
        level: LogLevel,
        message: str,
        data: Optional[dict] = None,
        step: Optional[str] = None,
        error: Optional[BaseException] = None,
    ):
        if not self._enabled(level):
            return
        self._emit(self._format_message(level, message, data, step))

        if error is not None and level in (LogLevel.ERROR, LogLevel.CRITICAL):
            self._emit(f"    Exception Type: {type(error).__name__}")
            self._emit(f"    Exception Message: {error}")
            if error.__traceback__ is not None:
                self._emit("    Traceback:")
                for line in traceback.format_tb(error.__traceback__):
                    for subline in line.strip().split("\n"):
                        self._emit(f"        {subline}")

    def debug(self, message: str, data: Optional[dict] = None, step: Optional[str] = None):
        self._log(LogLevel.DEBUG, message, data, step)

    def info(self, message: str, data: Optional[dict] = None, step: Optional[str] = None):
        self._log(LogLevel.INFO, message, data, step)

    def success(self, message: str, data: Optional[dict] = None, step: Optional[str] = None):
        self._log(LogLevel.SUCCESS, message, data, step)

    def warning(self, message: str, data: Optional[dict] = None, step: Optional[str] = None):
        self._log(LogLevel.WARNING, message, data, step)

    def error(self, message: str, error: Optional[BaseException] = None, data: Optional[dict] = None, step: Optional[str] = None):
        """Log an error message with optional exception details."""
        self._log(LogLevel.ERROR, message, data, step, error)

    def critical(self, message: str, error: Optional[BaseException] = None, data: Optional[dict] = None, step: Optional[str] = None):
        self._log(LogLevel.CRITICAL, message, data, step, error)

    def step_start(self, step_name: str, description: str = ""):
        """Log the start of a numbered experiment step."""
        self.step_count += 1
        msg = f"▶ STEP {self.step_count} STARTED: {step_name}"
        if description:
            msg += f" - {description}"
        self.info(msg, step=step_name)

    def step_complete(self, step_name: str, duration_ms: Optional[int] = None, data: Optional[dict] = None):
        log_data = dict(data or {})
        if duration_ms is not None:
            log_data["duration_ms"] = duration_ms
        self.success(f"◀ STEP COMPLETED: {step_name}", data=log_data or None, step=step_name)

    def step_failed(self, step_name: str, error: BaseException, data: Optional[dict] = None):
        self.error(f"✖ STEP FAILED: {step_name}", error=error, data=data, step=step_name)

    def separator(self, char: str = "=", length: int = 80):
        if not self._enabled(LogLevel.INFO):
            return
        line = char * length
        self._emit(f"{Colors.DIM}{line}{Colors.RESET}" if self.use_colors else line)

    def header(self, title: str):
        """Print a formatted banner."""
        if not self._enabled(LogLevel.INFO):
            return
        self.separator()
        centered = f" {title} ".center(80, "=")
        self._emit(f"{Colors.BOLD}{Colors.BRIGHT_CYAN}{centered}{Colors.RESET}" if self.use_colors else centered)
        self.separator()

    def subheader(self, title: str):
        if not self._enabled(LogLevel.INFO):
            return
        line = f"--- {title} ---"
        self._emit(f"{Colors.CYAN}{line}{Colors.RESET}" if self.use_colors else line)


def get_logger(component: str) -> LabLogger:
    """Get a logger instance for the specified component."""
    return LabLogger(component)
