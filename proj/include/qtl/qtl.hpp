#pragma once

#include "qtl/errors.hpp"
#include "qtl/tensor.hpp"
#include "qtl/bases.hpp"
#include "qtl/states.hpp"
#include "qtl/channels.hpp"
#include "qtl/optimizer.hpp"
#include "qtl/metrics.hpp"
#include "qtl/io.hpp"
#include "qtl/verify.hpp"
