#pragma once

#include "qsig/bounds.hpp"
#include "qsig/codec.hpp"
#include "qsig/error.hpp"
#include "qsig/file_io.hpp"
#include "qsig/hash.hpp"
#include "qsig/index_set.hpp"
#include "qsig/merkle.hpp"
#include "qsig/quoter.hpp"
#include "qsig/sigscheme.hpp"
#include "qsig/tokenizer.hpp"
#include "qsig/verifier.hpp"
