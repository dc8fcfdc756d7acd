import logging
import sys
import traceback
from typing import Any, Callable, Dict, Optional

# 批处理前端的退出码
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_OBSTRUCTED = 2
EXIT_INPUT = 3

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class DeformError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_INPUT, payload: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.payload = payload

    def to_dict(self) -> Dict[str, Any]:
        rv = dict(self.payload or ())
        rv['message'] = self.message
        rv['error'] = type(self).__name__
        return rv


class InputError(DeformError):
    """格式错误或数学上无效的输入"""


class ProblemSyntaxError(InputError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}",
                         payload={'line': line, 'column': column})
        self.reason = message
        self.line = line
        self.column = column


class ContextMismatchError(DeformError):
    def __init__(self, message: str = "operands live in different variable contexts"):
        super().__init__(message, exit_code=EXIT_INTERNAL)


class WildCharacteristicError(DeformError):
    def __init__(self, message: str = "order not invertible in the base field"):
        super().__init__(message, exit_code=EXIT_INTERNAL)


class CocycleError(InputError):
    """不满足余圈恒等式的映射 G -> M"""


class TwistError(DeformError):
    def __init__(self, message: str):
        super().__init__(message, exit_code=EXIT_INTERNAL)


class SliceError(DeformError):
    def __init__(self, message: str):
        super().__init__(message, exit_code=EXIT_INTERNAL)


def setup_logging(level: str = 'WARNING', log_file: Optional[str] = None) -> logging.Logger:
    """
    配置包日志: stderr 控制台处理器, 可选文件处理器
    """
    logger = logging.getLogger('eqdeform')
    logger.setLevel(getattr(logging, str(level).upper(), logging.WARNING))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    formatter = logging.Formatter(LOG_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


class ErrorHandler:
    def __init__(self, stream=None):
        self.stream = stream if stream is not None else sys.stderr
        self.logger = logging.getLogger('eqdeform.errors')

    def run(self, func: Callable[[], int]) -> int:
        """
        运行命令并把异常转换为退出码
        """
        try:
            return func()
        except DeformError as error:
            self.log_warning(error.message, error.to_dict())
            print(f"error: {error.message}", file=self.stream)
            return error.exit_code
        except Exception as error:
            self.log_error(error)
            print(f"internal error: {error}", file=self.stream)
            return EXIT_INTERNAL

    def log_error(self, error: Exception, context: Dict[str, Any] = None):
        self.logger.error({
            'error': str(error),
            'traceback': traceback.format_exc(),
            'context': context or {}
        })

    def log_warning(self, message: str, context: Dict[str, Any] = None):
        self.logger.warning({'message': message, 'context': context or {}})
