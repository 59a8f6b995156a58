"""Plain stochastic gradient descent, as pinned by the training recipe."""


def sgd_step(params, lr: float):
    """In-place update p <- p - lr * grad for every parameter, then zero grads.

    Raises if any parameter is missing a gradient: the training loops zero
    grads only through this step, so a missing grad means a wiring bug.
    """
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    params = list(params)
    for p in params:
        if p.grad is None:
            raise ValueError("sgd_step: parameter has no gradient")
        if p.grad.shape != p.data.shape:
            raise ValueError(
                f"sgd_step: gradient shape {p.grad.shape} != parameter shape {p.data.shape}"
            )
    for p in params:
        p.data -= lr * p.grad
        p.grad = None
