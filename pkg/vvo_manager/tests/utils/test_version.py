from io import StringIO
from unittest.mock import patch, Mock

from pkg_resources import DistributionNotFound

from vvo_manager.utils.version import show_version, get_version
from vvo_manager.tests import VVOTestCase


class TestShowVersion(VVOTestCase):
    def setUp(self) -> None:
        self.package = Mock()
        self.package.version = 1
        self.require = self.set_up_patch("vvo_manager.utils.version.require")
        self.require.return_value = [self.package]

    @patch("sys.stdout", new_callable=StringIO)
    def test_show_version_shows_version(self, stdout):
        show_version()
        self.assertEqual(stdout.getvalue().strip(), "VVO manager version 1")

    def test_get_version_asks_for_the_vvo_manager_distribution(self):
        get_version()
        self.require.assert_called_once_with("vvo-manager")

    def test_get_version_reports_when_not_installed(self):
        self.require.side_effect = DistributionNotFound()
        self.assertEqual(get_version(), "unknown (not installed)")
