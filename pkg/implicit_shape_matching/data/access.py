"""Helper for the scenes shipped with the package."""
import importlib.resources as resources
from logging import getLogger
from typing import List

from ..scene import Scene
from ..scene import read_scene

LOG = getLogger(__name__)


class PkgDataAccess:
    """Package scene bindings."""

    PACKAGE = "implicit_shape_matching.data"
    SUFFIX = ".json"

    @staticmethod
    def list_scenes() -> List[str]:
        """
        Lists the names of the bundled scenes.

        Returns
        -------
        List[str]
            Sorted scene names, without the file suffix.

        """
        folder = resources.files(PkgDataAccess.PACKAGE)
        return sorted(
            entry.name[: -len(PkgDataAccess.SUFFIX)]
            for entry in folder.iterdir()
            if entry.name.endswith(PkgDataAccess.SUFFIX)
        )

    @staticmethod
    def locate_scene(name: str) -> str:
        """
        Locates a bundled scene on the current system.

        Parameters
        ----------
        name : str
            Scene name, e.g. 'square_drop_2d'.

        Returns
        -------
        str
            The path to the scene file.

        Raises
        ------
        FileNotFoundError
            If no scene of that name is bundled.

        """
        file_path = resources.files(PkgDataAccess.PACKAGE) / (
            name + PkgDataAccess.SUFFIX
        )
        if not file_path.is_file():
            raise FileNotFoundError(
                f"No bundled scene '{name}', "
                f"available: {', '.join(PkgDataAccess.list_scenes())}."
            )
        LOG.info("Bundled scene at '%s' ...", file_path)
        return str(file_path)

    @staticmethod
    def load_scene(name: str) -> Scene:
        """
        Loads a bundled scene.

        Parameters
        ----------
        name : str
            Scene name.

        Returns
        -------
        Scene
            The parsed scene.

        """
        return read_scene(PkgDataAccess.locate_scene(name))
