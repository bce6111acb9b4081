from os import listdir
from os.path import join
from tempfile import TemporaryDirectory
from unittest.mock import mock_open, patch

from vvo_manager.tests import VVOTestCase
from vvo_manager.utils.files import get_yaml_files_from_disk_path, get_yaml_content, read_file_content, write_file_atomically

DATA = """---
case: cases/case4_vvo.m
        """


class TestGetYAMLContent(VVOTestCase):
    def setUp(self) -> None:
        self.isfile = self.set_up_patch("vvo_manager.utils.files.isfile")

    @patch("builtins.open", new_callable=mock_open, read_data=DATA)
    def test_get_yaml_content_calls_isfile(self, _):
        get_yaml_content("path")
        self.isfile.assert_called_once_with("path")

    @patch("builtins.open", new_callable=mock_open, read_data=DATA)
    def test_get_yaml_content_opens_path(self, open_mock):
        get_yaml_content("path")
        open_mock.assert_called_once_with("path", "r")

    @patch("builtins.open", new_callable=mock_open, read_data=DATA)
    def test_get_yaml_content_returns_parsed_yaml(self, _):
        content = get_yaml_content("path")
        self.assertEqual(content["case"], "cases/case4_vvo.m")

    @patch("builtins.open", new_callable=mock_open, read_data="---\n")
    def test_get_yaml_content_returns_empty_dict_for_empty_document(self, _):
        self.assertEqual(get_yaml_content("path"), {})

    def test_get_yaml_content_raises_io_error_if_file_does_not_exist(self):
        self.isfile.return_value = False
        with self.assertRaises(IOError):
            get_yaml_content("path")


class TestReadFileContent(VVOTestCase):
    def setUp(self) -> None:
        self.isfile = self.set_up_patch("vvo_manager.utils.files.isfile")

    @patch("builtins.open", new_callable=mock_open, read_data=DATA)
    def test_read_file_content_returns_the_text(self, _):
        self.assertEqual(read_file_content("path"), DATA)

    def test_read_file_content_raises_io_error_if_file_does_not_exist(self):
        self.isfile.return_value = False
        with self.assertRaises(IOError):
            read_file_content("path")


class TestWriteFileAtomically(VVOTestCase):
    def test_write_file_atomically_writes_the_content(self):
        with TemporaryDirectory() as directory:
            path = join(directory, "report.txt")
            write_file_atomically(path, DATA)
            with open(path, "r") as fh:
                self.assertEqual(fh.read(), DATA)

    def test_write_file_atomically_replaces_an_existing_file(self):
        with TemporaryDirectory() as directory:
            path = join(directory, "report.txt")
            write_file_atomically(path, "old")
            write_file_atomically(path, "new")
            with open(path, "r") as fh:
                self.assertEqual(fh.read(), "new")

    def test_write_file_atomically_leaves_no_temporary_files(self):
        with TemporaryDirectory() as directory:
            write_file_atomically(join(directory, "report.txt"), DATA)
            self.assertEqual(listdir(directory), ["report.txt"])

    def test_write_file_atomically_removes_the_temporary_file_if_writing_fails(self):
        temporary_file = self.set_up_context_manager_patch("vvo_manager.utils.files.NamedTemporaryFile")
        temporary_file.return_value.name = "/tmp/.vvo-1234.tmp"
        temporary_file.return_value.write.side_effect = IOError("disk full")
        unlink = self.set_up_patch("vvo_manager.utils.files.unlink")
        replace = self.set_up_patch("vvo_manager.utils.files.replace")
        with self.assertRaises(IOError):
            write_file_atomically("/tmp/report.txt", DATA)
        unlink.assert_called_once_with("/tmp/.vvo-1234.tmp")
        self.assertFalse(replace.called)


class TestGetYAMLFilesFromDiskPath(VVOTestCase):
    def setUp(self) -> None:
        self.walk = self.set_up_patch("vvo_manager.utils.files.walk")
        self.walk.return_value = [
            ("/foo", ("bar",), ("baz",)),
            ("/foo/bar", (), ("spam.yaml", "eggs.yml", "case.m")),
        ]

    def test_get_yaml_files_from_disk_path_calls_walk(self):
        get_yaml_files_from_disk_path("path")
        self.walk.assert_called_once_with("path")

    def test_get_yaml_files_from_disk_path_returns_yaml_files_in_path(self):
        self.assertEqual(get_yaml_files_from_disk_path("path"), ["/foo/bar/spam.yaml", "/foo/bar/eggs.yml"])

    def test_get_yaml_files_from_disk_path_excludes_files(self):
        self.assertEqual(get_yaml_files_from_disk_path("path", excludes_files=["spam.yaml"]), ["/foo/bar/eggs.yml"])

    def test_get_yaml_files_from_disk_path_excludes_full_paths(self):
        self.assertEqual(get_yaml_files_from_disk_path("path", excludes_files=["/foo/bar/eggs.yml"]), ["/foo/bar/spam.yaml"])
