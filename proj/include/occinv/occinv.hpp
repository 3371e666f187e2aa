#pragma once

#include "occinv/error.hpp"
#include "occinv/algebra/closed_form.hpp"
#include "occinv/algebra/cyclotomic.hpp"
#include "occinv/algebra/expr_parser.hpp"
#include "occinv/program/ast.hpp"
#include "occinv/program/classify.hpp"
#include "occinv/program/desugar.hpp"
#include "occinv/program/parser.hpp"
#include "occinv/program/printer.hpp"
#include "occinv/semantics/semantics.hpp"
#include "occinv/invariant/invariant.hpp"
#include "occinv/synthesis/positivity.hpp"
#include "occinv/synthesis/template.hpp"
#include "occinv/synthesis/system.hpp"
#include "occinv/synthesis/solver.hpp"
#include "occinv/synthesis/smtlib.hpp"
#include "occinv/synthesis/synthesize.hpp"
#include "occinv/oracle/sparse.hpp"
#include "occinv/oracle/exec.hpp"
#include "occinv/oracle/chain.hpp"
