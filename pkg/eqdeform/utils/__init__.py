"""
公共工具: 异常体系、日志配置、结果缓存
"""
