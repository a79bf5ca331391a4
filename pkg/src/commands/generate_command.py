"""
Generate command handler for the MBT extinction solver.
Writes a generated instance to a problem file.
"""
import argparse
import logging

from ..models.instances import Family, GeneratorSpec, critical_lambda, generate
from ..models.storage import save_problem
from ..utils.config import EXIT_OK
from .base import CommandHandler

logger = logging.getLogger(__name__)


class GenerateCommand(CommandHandler):
    """Command handler for `generate`."""

    @property
    def command_name(self) -> str:
        return "generate"

    @property
    def description(self) -> str:
        return "Write a generated instance (family,n,lambda,seed) to a problem file."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--generate', required=True, metavar='FAMILY,N,LAMBDA,SEED')
        parser.add_argument('--output', required=True, metavar='FILE')

    def handle(self, args: argparse.Namespace) -> int:
        spec = GeneratorSpec.parse(args.generate)
        problem = generate(spec)
        meta = {'generator': spec.describe()}
        if spec.family is Family.RANDOM_MBT:
            meta['lambda_crit'] = critical_lambda(spec)
        save_problem(args.output, problem, meta)
        self.send_response(f"wrote n={problem.n} {spec.family.value} instance to {args.output}")
        return EXIT_OK
