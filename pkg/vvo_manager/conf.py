from collections.abc import Mapping
from types import ModuleType
from typing import Any, Iterator, List
import importlib
import os

ENV_VAR = "SETTINGS_MODULE"
DEFAULT_SETTINGS_MODULE = "vvo_manager.settings.base"


class Settings(Mapping):
    """
    Read-only view on the upper case names of a settings module
    :param str settings_module_name: dotted path of the module to load
    """

    def __init__(self, settings_module_name: str):
        self.settings_module_name = settings_module_name
        module = importlib.import_module(settings_module_name)
        for setting in self._setting_names(module):
            setattr(self, setting, getattr(module, setting))

    @staticmethod
    def _setting_names(module: ModuleType) -> List[str]:
        return [name for name in dir(module) if name.isupper()]

    def __getitem__(self, item: str) -> Any:
        try:
            return getattr(self, item)
        except AttributeError as e:
            raise KeyError(item) from e

    def __iter__(self) -> Iterator[str]:
        return iter(self._setting_names(self))

    def __len__(self) -> int:
        return len(self._setting_names(self))


def get_settings_module_name() -> str:
    return os.environ.get(ENV_VAR, DEFAULT_SETTINGS_MODULE)


settings = Settings(get_settings_module_name())
