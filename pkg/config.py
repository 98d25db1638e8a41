# VRJP Lab 运行时配置
# 实验参数写在 JSON 配置中，这里只放与结果无关的运行设置

# 工作进程数（环境变量 VRJP_LAB_THREADS 优先），结果与它无关
THREADS = 1

# 配置中没有给出种子时使用的主种子
DEFAULT_SEED = 20240101

# 单条轨迹的跳跃数上限
MAX_JUMPS = 50_000_000

# 自定义权重尾积分的认证容差
QUADRATURE_TOLERANCE = 1e-10

OUTPUT_DIR = "runs"
VERBOSE = False
