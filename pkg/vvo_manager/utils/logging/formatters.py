from copy import copy
from logging import Formatter, LogRecord, INFO, DEBUG, WARNING, ERROR, CRITICAL
from typing import Callable, Dict, List, Optional, Union
import warnings

try:
    import colorama
except ImportError:
    colorama = None

Palette = Dict[str, Dict[Union[int, str], List[str]]]

if colorama:
    default_palette = {
        "asctime": {
            "*": [colorama.Fore.BLACK, colorama.Style.BRIGHT],
        },
        "level": {
            DEBUG: [colorama.Fore.WHITE, colorama.Style.DIM],
            WARNING: [colorama.Fore.YELLOW],
            ERROR: [colorama.Fore.RED],
            CRITICAL: [colorama.Fore.RED, colorama.Style.BRIGHT],
        },
        "msg": {
            DEBUG: [colorama.Fore.WHITE, colorama.Style.DIM],
            WARNING: [colorama.Style.BRIGHT],
            ERROR: [colorama.Fore.RED],
            CRITICAL: [colorama.Fore.RED, colorama.Style.BRIGHT],
        },
        # Keyed by logger name prefix, overrides the "msg" styles
        "logger": {
            "vvo_manager.nlp": [colorama.Fore.CYAN, colorama.Style.DIM],
        },
    }
    _RESET = colorama.Style.RESET_ALL
else:
    default_palette = {"asctime": {}, "level": {}, "msg": {}, "logger": {}}
    _RESET = ""


def _empty_palette() -> Palette:
    return {"asctime": {}, "level": {}, "msg": {}, "logger": {}}


class ConsoleFormatter(Formatter):
    """
    Log formatter that colors the level, message and time of a record for console output.
    Messages of the solver loggers get their own style so iteration logs are easy to tell apart.

    :param str fmt: format string
    :param str datefmt: format string for log date time
    :param bool|callable colored: add ANSI colors to logs, callables are called and their return value used
    """

    def __init__(self, fmt: str = None, datefmt: str = None, colored: Union[Callable[[], bool], bool] = True):
        Formatter.__init__(self, fmt, datefmt)
        self._colored = bool(colored()) if colored and not isinstance(colored, bool) else colored
        if self._colored and not colorama:
            warnings.warn("can't format colored log message. dependency package 'colorama' is not installed")
            self._colored = False
        self._palette = default_palette if self._colored else _empty_palette()

    @property
    def colored(self) -> bool:
        return self._colored

    def format(self, record: LogRecord) -> str:
        if self._colored:
            return self._colored_format(record)
        return Formatter.format(self, record)

    @staticmethod
    def _styles_for(palette: Dict[Union[int, str], List[str]], level: int) -> List[str]:
        return palette[level] if level in palette else palette.get("*", [])

    def _logger_styles(self, name: str) -> Optional[List[str]]:
        for prefix, styles in self._palette["logger"].items():
            if name == prefix or name.startswith(prefix + "."):
                return styles
        return None

    def _colored_format(self, record: LogRecord) -> str:
        record = copy(record)  # the record is shared with other handlers
        level = getattr(record, "levelno", INFO)

        level_styles = self._styles_for(self._palette["level"], level)
        if level_styles:
            record.levelname = "".join(level_styles) + str(record.levelname) + _RESET

        msg_styles = self._styles_for(self._palette["msg"], level)
        if level < WARNING:
            msg_styles = self._logger_styles(record.name) or msg_styles
        if msg_styles:
            record.msg = "".join(msg_styles) + str(record.msg) + _RESET

        return Formatter.format(self, record)

    def formatTime(self, record: LogRecord, datefmt: str = None) -> str:
        formatted_time = Formatter.formatTime(self, record, datefmt)
        if self._colored:
            asctime_styles = self._styles_for(self._palette["asctime"], getattr(record, "levelno", INFO))
            if asctime_styles:
                return "".join(asctime_styles) + formatted_time + _RESET
        return formatted_time
