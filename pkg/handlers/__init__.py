from handlers.command import (CommandHandler, CommandBaseError, UsageError, build_parser, run,
                              EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC)
from handlers.manifest import RunManifest, read_manifests
