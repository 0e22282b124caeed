from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

import log
from rest_framework.renderers import JSONRenderer

from dqengine.optimize.types import OptimizationError

from .. import constants
from ..helpers import atomic_write, read_config


def boolean(text: str) -> bool:
    value = text.strip().lower()
    if value in constants.TRUE_VALUES:
        return True
    if value in constants.FALSE_VALUES:
        return False
    raise ValueError(f"Expected a boolean: {text!r}")


def floats(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip()]


class EngineCommand(BaseCommand):
    """Base for the engine commands: config files, JSON output and exit codes.

    Every flag defaults to None so values from `--config` only fill the gaps
    the command line leaves; `get_defaults` then fills whatever remains.
    """

    sign_flags = True

    def create_parser(self, prog_name, subcommand, **kwargs):
        self.flags = {}
        return super().create_parser(prog_name, subcommand, **kwargs)

    def option(self, parser, *names, **kwargs):
        action = parser.add_argument(*names, **kwargs)
        self.flags[names[0].lstrip("-").replace("-", "_")] = action
        return action

    def add_arguments(self, parser):
        parser.add_argument("--config", help="key=value file merged under the flags")
        self.option(parser, "--output", help="JSON destination (default: stdout)")
        self.option(parser, "--seed", type=int)
        if self.sign_flags:
            sign = parser.add_mutually_exclusive_group()
            self.option(
                sign,
                "--losses",
                dest="returns",
                action="store_false",
                default=None,
                help="columns hold losses",
            )
            self.option(
                sign,
                "--returns",
                dest="returns",
                action="store_true",
                default=None,
                help="columns hold returns, negated into losses",
            )
        self.add_engine_arguments(parser)

    def add_engine_arguments(self, parser):
        pass

    def get_defaults(self) -> dict:
        return {"seed": settings.DQ_DEFAULT_SEED, "returns": False}

    def run(self, **options) -> dict:
        raise NotImplementedError

    def handle(self, *args, **options):
        options = self.merge_config(options)
        for key, value in self.get_defaults().items():
            if options.get(key) is None:
                options[key] = value

        try:
            payload = self.run(**options)
            self.write(payload, options.get("output"))
        except OptimizationError as exc:
            log.error(f"Solver failed: {exc}")
            raise CommandError(
                f"Solver failed: {exc}", returncode=constants.SOLVER_EXIT
            ) from exc
        except OSError as exc:
            log.error(f"I/O failed: {exc}")
            raise CommandError(str(exc), returncode=constants.IO_EXIT) from exc
        except ValueError as exc:
            log.error(f"Invalid input: {exc}")
            raise CommandError(str(exc), returncode=constants.VALIDATION_EXIT) from exc

    def merge_config(self, options: dict) -> dict:
        path = options.get("config")
        if not path:
            return options
        try:
            values = read_config(path)
        except OSError as exc:
            raise CommandError(str(exc), returncode=constants.IO_EXIT) from exc
        except ValueError as exc:
            raise CommandError(str(exc), returncode=constants.VALIDATION_EXIT) from exc

        for key, text in values.items():
            action = self.flags.get(key)
            if action is None:
                raise CommandError(
                    f"Unknown option in {path}: {key}",
                    returncode=constants.VALIDATION_EXIT,
                )
            if options.get(action.dest) is None:
                options[action.dest] = self.convert(key, action, text)
        log.debug(f"Merged {len(values)} option(s) from {path}")
        return options

    def convert(self, key: str, action, text: str):
        try:
            if action.nargs == 0:
                return action.const if boolean(text) else not action.const
            value = action.type(text) if action.type else text
        except ValueError as exc:
            raise CommandError(
                f"Invalid value for {key}: {text!r}",
                returncode=constants.VALIDATION_EXIT,
            ) from exc
        if action.choices and value not in action.choices:
            raise CommandError(
                f"{key} must be one of {', '.join(map(str, action.choices))}: {value}",
                returncode=constants.VALIDATION_EXIT,
            )
        return value

    def require(self, value, name: str):
        if value is None:
            raise CommandError(
                f"--{name} is required", returncode=constants.VALIDATION_EXIT
            )
        return value

    def write(self, payload: dict, output: str | None):
        renderer = JSONRenderer()
        content = renderer.render(payload, renderer_context={"indent": 2}).decode()
        if output:
            atomic_write(output, content + "\n")
            log.info(f"Wrote {output}")
        else:
            self.stdout.write(content)
