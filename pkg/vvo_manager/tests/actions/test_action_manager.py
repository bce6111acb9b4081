from unittest.mock import MagicMock

from vvo_manager.tests import VVOTestCase
from vvo_manager.actions.manager import ActionManager
from vvo_manager.caseio.devices import DeviceConfig
from vvo_manager.conf import settings
from vvo_manager.exceptions import CaseParseError, ReferenceOpfError


class TestActionManager(VVOTestCase):
    def setUp(self) -> None:
        self.get_run_spec = self.set_up_patch("vvo_manager.actions.manager.get_run_spec", return_value={"case": "case.m"})
        self.apply_overrides = self.set_up_patch("vvo_manager.actions.manager.apply_overrides", side_effect=lambda config, _: config)
        self.validator = MagicMock()
        self.validator.config_validation_successful = True
        self.validator.updated_config = {"case": "/cases/case.m", "devices": {"cb_module_count": 2}, "output": {"path": None}}
        self.validate = self.set_up_patch("vvo_manager.actions.manager.ValidateRunSpec", return_value=self.validator)
        self.run_spec = self.set_up_patch("vvo_manager.actions.manager.RunSpec")
        self.run_case = self.set_up_patch("vvo_manager.actions.manager.run_case", return_value=settings.EXIT_CODE_SUCCESS)
        self.check_state_file = self.set_up_patch("vvo_manager.actions.manager.check_state_file", return_value=settings.EXIT_CODE_SUCCESS)
        self.show_case = self.set_up_patch("vvo_manager.actions.manager.show_case", return_value=True)
        self.snapshot_case = self.set_up_patch("vvo_manager.actions.manager.snapshot_case")
        self.show_version = self.set_up_patch("vvo_manager.actions.manager.show_version")
        self.display_help_for_action = self.set_up_patch("vvo_manager.actions.manager.display_help_for_action")
        self.logger = self.set_up_patch("vvo_manager.actions.manager.logger")

    def test_action_raises_not_implemented_error_if_unsupported_action(self):
        with self.assertRaises(NotImplementedError):
            ActionManager().execute("not_working")

    def test_action_manager_calls_show_version_with_version_action(self):
        ret = ActionManager().execute("version")
        self.show_version.assert_called_once_with()
        self.assertEqual(ret, settings.EXIT_CODE_SUCCESS)
        self.assertFalse(self.get_run_spec.called)

    def test_action_manager_displays_help_when_config_is_help(self):
        ret = ActionManager(config_path="help").execute("run")
        self.display_help_for_action.assert_called_once_with("run")
        self.assertEqual(ret, settings.EXIT_CODE_SUCCESS)
        self.assertFalse(self.run_case.called)

    def test_action_manager_loads_and_overrides_the_run_spec(self):
        ActionManager(config_path="spec.yaml", overrides={"tol": 1e-3}).execute("run")
        self.get_run_spec.assert_called_once_with("spec.yaml")
        self.apply_overrides.assert_called_once_with({"case": "case.m"}, {"tol": 1e-3})
        self.validate.assert_called_once_with({"case": "case.m"})
        self.validator.validate.assert_called_once_with()

    def test_action_manager_returns_error_if_validator_unsuccessful(self):
        self.validator.config_validation_successful = False
        ret = ActionManager(config_path="spec.yaml").execute("run")
        self.assertEqual(ret, settings.EXIT_CODE_ERROR)
        self.assertFalse(self.run_case.called)

    def test_action_manager_run_action(self):
        ret = ActionManager(config_path="spec.yaml").execute("run")
        self.run_spec.from_config.assert_called_once_with(self.validator.updated_config)
        self.run_case.assert_called_once_with(self.run_spec.from_config.return_value)
        self.assertEqual(ret, settings.EXIT_CODE_SUCCESS)

    def test_action_manager_passes_the_run_exit_code_on(self):
        self.run_case.return_value = settings.EXIT_CODE_NO_SOLUTION
        self.assertEqual(ActionManager(config_path="spec.yaml").execute("run"), settings.EXIT_CODE_NO_SOLUTION)

    def test_action_manager_check_action(self):
        ret = ActionManager(config_path="spec.yaml", state_path="state.json").execute("check")
        self.check_state_file.assert_called_once_with("/cases/case.m", "state.json", DeviceConfig(cb_module_count=2))
        self.assertEqual(ret, settings.EXIT_CODE_SUCCESS)

    def test_action_manager_check_action_without_state_fails(self):
        self.assertEqual(ActionManager(config_path="spec.yaml").execute("check"), settings.EXIT_CODE_ERROR)
        self.assertFalse(self.check_state_file.called)

    def test_action_manager_show_action(self):
        self.assertEqual(ActionManager(config_path="spec.yaml").execute("show"), settings.EXIT_CODE_SUCCESS)
        self.show_case.assert_called_once_with("/cases/case.m", DeviceConfig(cb_module_count=2))

    def test_action_manager_show_action_returns_error_for_an_invalid_network(self):
        self.show_case.return_value = False
        self.assertEqual(ActionManager(config_path="spec.yaml").execute("show"), settings.EXIT_CODE_ERROR)

    def test_action_manager_snapshot_action(self):
        self.assertEqual(ActionManager(config_path="spec.yaml").execute("snapshot"), settings.EXIT_CODE_SUCCESS)
        self.snapshot_case.assert_called_once_with("/cases/case.m", DeviceConfig(cb_module_count=2), None)

    def test_action_manager_turns_handled_errors_into_the_error_exit_code(self):
        for error in (CaseParseError("broken", 3), ReferenceOpfError("failed"), IOError("gone")):
            self.run_case.side_effect = error
            self.assertEqual(ActionManager(config_path="spec.yaml").execute("run"), settings.EXIT_CODE_ERROR)
        self.logger.critical.assert_called_with("run action failed: gone")

    def test_action_manager_does_not_hide_unexpected_errors(self):
        self.run_case.side_effect = KeyError("bug")
        with self.assertRaises(KeyError):
            ActionManager(config_path="spec.yaml").execute("run")
