"""
异常定义
VRJP Lab 各模块共用的异常层次
"""


class VrjpLabError(Exception):
    """所有库内异常的基类"""


class ConfigurationError(VrjpLabError, ValueError):
    """配置或参数不合法（CLI 退出码 2）"""


class WeightDomainError(VrjpLabError, ValueError):
    """权重函数在定义域 [1, ∞) 之外求值"""


class EvaluatorError(VrjpLabError):
    """自定义权重函数的求值器失败"""


class TailCertificationError(VrjpLabError):
    """无法在容差内证明尾积分的截断误差"""


class IsolatedVertexError(VrjpLabError):
    """当前顶点在顶点集内没有邻居"""


class ExplosionError(VrjpLabError):
    """逗留时间退化为 0，时间无法推进"""


class InsufficientEnsembleError(VrjpLabError):
    """统计检验所需的样本数不足"""


class UnsupportedOperationError(VrjpLabError):
    """当前权重或状态不支持该操作"""


class EmptySampleError(VrjpLabError, ValueError):
    """统计检验收到空样本"""


class TimeRangeError(VrjpLabError, ValueError):
    """查询时间超出轨迹范围"""
