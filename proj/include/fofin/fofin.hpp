#pragma once

#include "fofin/constructions.hpp"
#include "fofin/error.hpp"
#include "fofin/evaluator.hpp"
#include "fofin/expr.hpp"
#include "fofin/formula.hpp"
#include "fofin/link_graph.hpp"
#include "fofin/normalize.hpp"
#include "fofin/parser.hpp"
#include "fofin/predicates.hpp"
#include "fofin/printer.hpp"
#include "fofin/protocol.hpp"
#include "fofin/random.hpp"
#include "fofin/random_formula.hpp"
#include "fofin/registry_json.hpp"
#include "fofin/word.hpp"
#include "fofin/workzone.hpp"
