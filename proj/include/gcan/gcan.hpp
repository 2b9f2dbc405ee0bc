#pragma once

#include "gcan/algebra.hpp"
#include "gcan/batch.hpp"
#include "gcan/error.hpp"
#include "gcan/layers/action_kernel.hpp"
#include "gcan/layers/conv2d.hpp"
#include "gcan/layers/kernels.hpp"
#include "gcan/layers/linear.hpp"
#include "gcan/layers/msilu.hpp"
#include "gcan/layers/norm.hpp"
#include "gcan/multivector.hpp"
#include "gcan/pin.hpp"
#include "gcan/tetris/dataset.hpp"
#include "gcan/tetris/experiment.hpp"
#include "gcan/tetris/models.hpp"
#include "gcan/train/adam.hpp"
#include "gcan/train/checkpoint.hpp"
#include "gcan/train/dense.hpp"
#include "gcan/train/grad_check.hpp"
#include "gcan/train/loop.hpp"
#include "gcan/train/loss.hpp"
#include "gcan/train/params.hpp"
#include "gcan/train/rng.hpp"
