#pragma once

#include "geogap/artifact_io.hpp"
#include "geogap/baselines.hpp"
#include "geogap/config.hpp"
#include "geogap/corpus.hpp"
#include "geogap/embedding_store.hpp"
#include "geogap/error.hpp"
#include "geogap/eval.hpp"
#include "geogap/eval_io.hpp"
#include "geogap/gap_scoring.hpp"
#include "geogap/matrix.hpp"
#include "geogap/pipeline.hpp"
#include "geogap/prototype.hpp"
#include "geogap/remote.hpp"
#include "geogap/reporting.hpp"
#include "geogap/synthetic.hpp"
#include "geogap/topic.hpp"
