from io import StringIO
from unittest.mock import patch

from vvo_manager.tests import VVOTestCase
from vvo_manager.actions.help import default_grid_text, display_help_for_action
from vvo_manager.conf import settings


class TestDisplayHelpForAction(VVOTestCase):
    def setUp(self) -> None:
        self.logger = self.set_up_patch("vvo_manager.actions.help.logger")

    @patch("sys.stdout", new_callable=StringIO)
    def test_display_help_for_action_does_not_print_anything_if_unknown_action(self, stdout):
        display_help_for_action("banana")
        self.logger.warning.assert_called_once_with("No help text available for action banana")
        self.assertFalse(self.logger.debug.called)
        self.assertEqual(stdout.getvalue(), "")

    @patch("sys.stdout", new_callable=StringIO)
    def test_display_help_for_action_prints_mapped_help_text(self, stdout):
        display_help_for_action("check")
        self.assertTrue(stdout.getvalue().startswith(settings.HELP_TEXT_ACTION_MAPPING["check"].strip()))

    @patch("sys.stdout", new_callable=StringIO)
    def test_display_help_for_action_run_lists_the_default_grid(self, stdout):
        display_help_for_action("run")
        self.assertIn(default_grid_text(), stdout.getvalue())

    @patch("sys.stdout", new_callable=StringIO)
    def test_display_help_for_action_points_case_actions_to_the_run_spec_docs(self, stdout):
        display_help_for_action("show")
        self.assertIn("Run spec format:", stdout.getvalue())

    @patch("sys.stdout", new_callable=StringIO)
    def test_display_help_for_action_version_has_no_run_spec_line(self, stdout):
        display_help_for_action("version")
        self.assertEqual(stdout.getvalue().strip(), settings.HELP_TEXT_ACTION_MAPPING["version"])

    def test_default_grid_text(self):
        self.assertEqual(default_grid_text(), "Default grid: lambda_p 1, 5, inf crossed with tap/CB ranges ±3 0-2, ±3 0-3, ±16 0-3.")

    def test_every_action_has_a_help_text(self):
        self.assertEqual(sorted(settings.HELP_TEXT_ACTION_MAPPING), sorted(settings.VALID_ACTIONS))
