from .tensor import (
    Tensor,
    Graph,
    OpRecord,
    backward,
    current_graph,
    no_grad,
    reset_graph,
)
from .ops import (
    add,
    concat,
    conv2d,
    cross_entropy,
    elementwise_mul,
    global_avg_pool,
    linear,
    max_elementwise,
    relu,
    reshape,
    softmax,
    softmax_vector,
    sum_all,
    sum_axes,
)
from .optim import SgdState, sgd_step, zero_grad
