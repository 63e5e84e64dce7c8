#pragma once

#include "nnefx/analysis.hpp"
#include "nnefx/ast.hpp"
#include "nnefx/coloured.hpp"
#include "nnefx/conventions.hpp"
#include "nnefx/dot.hpp"
#include "nnefx/errors.hpp"
#include "nnefx/eval.hpp"
#include "nnefx/lexer.hpp"
#include "nnefx/ops.hpp"
#include "nnefx/parser.hpp"
#include "nnefx/petri.hpp"
#include "nnefx/runtime.hpp"
#include "nnefx/serialize.hpp"
#include "nnefx/shapes.hpp"
#include "nnefx/split.hpp"
#include "nnefx/tensor.hpp"
#include "nnefx/trace.hpp"
#include "nnefx/validate.hpp"
#include "nnefx/weights.hpp"
