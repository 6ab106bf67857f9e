from util.console import Console, Color
from util.worker import ThreadPool, WorkerTaskError, thread_count
from util import file_handler
