from loguru import logger

log = logger

# library code stays quiet until a front end (the CLI, a notebook) opts in
log.disable("hausdorffcs")
