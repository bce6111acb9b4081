from logging import DEBUG, INFO, WARNING
from unittest.mock import Mock

from vvo_manager.tests import VVOTestCase
from vvo_manager.vvo_manager import main

default_args = ["run", "spec.yaml"]


class TestVVOManagerMain(VVOTestCase):
    def setUp(self) -> None:
        self.setup_console_logging = self.set_up_patch("vvo_manager.vvo_manager.setup_console_logging")
        self.manager = Mock()
        self.manager.execute.return_value = 0
        self.action_manager = self.set_up_patch("vvo_manager.vvo_manager.ActionManager", return_value=self.manager)

    def test_main_calls_setup_console_logging(self):
        main(default_args)
        self.setup_console_logging.assert_called_once_with(verbosity=INFO, solver_log=False)

    def test_main_call_setup_console_logging_with_verbose(self):
        main(default_args + ["--verbose"])
        self.setup_console_logging.assert_called_once_with(verbosity=DEBUG, solver_log=False)

    def test_main_call_setup_console_logging_with_quiet(self):
        main(default_args + ["-q"])
        self.setup_console_logging.assert_called_once_with(verbosity=WARNING, solver_log=False)

    def test_main_enables_the_solver_log(self):
        main(default_args + ["--solver-log"])
        self.setup_console_logging.assert_called_once_with(verbosity=INFO, solver_log=True)

    def test_main_calls_action_manager(self):
        main(default_args)
        _, kwargs = self.action_manager.call_args
        self.assertEqual(kwargs["config_path"], "spec.yaml")
        self.assertIsNone(kwargs["state_path"])
        self.assertIsNone(kwargs["overrides"]["case"])

    def test_main_passes_the_state_file(self):
        main(["check", "--case", "case.m", "--state", "state.json"])
        _, kwargs = self.action_manager.call_args
        self.assertEqual(kwargs["state_path"], "state.json")
        self.assertIsNone(kwargs["config_path"])

    def test_main_executes_the_action_and_returns_its_exit_code(self):
        self.manager.execute.return_value = 2
        self.assertEqual(main(default_args), 2)
        self.manager.execute.assert_called_once_with("run")
