from __future__ import annotations

from django.core.management.base import CommandError

from reduction.af import AcceptanceMode, enumerate_extensions, oracle_accept
from reduction.management.base import ReductionCommand


class Command(ReductionCommand):
    help = "Answer from the brute-force semantics oracle"

    def add_arguments(self, parser):
        self.add_semantics_argument(parser)
        parser.add_argument("af")
        parser.add_argument("--enumerate", action="store_true", help="List every extension.")
        parser.add_argument("--arg", dest="argument", help="Decide acceptance of this argument instead.")
        parser.add_argument("--mode", choices=AcceptanceMode.values, default=AcceptanceMode.CREDULOUS)

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        if options["argument"]:
            accepted = oracle_accept(af, options["sem"], options["argument"], options["mode"])
            self.stdout.write("YES" if accepted else "NO")
            if not accepted:
                raise CommandError(f"{options['argument']} is not accepted.", returncode=1)
            return
        extensions = enumerate_extensions(af, options["sem"])
        if options["enumerate"]:
            for extension in extensions:
                members = [name for name in af.arguments if name in extension]
                self.stdout.write("{" + ",".join(members) + "}")
        else:
            self.stdout.write(str(len(extensions)))
