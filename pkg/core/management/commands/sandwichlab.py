import argparse

from django.core.management.base import BaseCommand, CommandError, CommandParser

from core.cli import add_subcommands, execute


class SubcommandParser(CommandParser):
    def error(self, message):
        raise CommandError(f"Error: {message}", returncode=2)


class Command(BaseCommand):
    help = "SandwichLab: pc-group catalog, Engel/sandwich checks and Lie algebra constructions"

    def add_arguments(self, parser):
        add_subcommands(parser, parser_class=SubcommandParser)

    def handle(self, *args, **options):
        code = execute(argparse.Namespace(**options), stdout=self.stdout, stderr=self.stderr)
        if code:
            raise CommandError(f"sandwichlab exited with status {code}", returncode=code)
