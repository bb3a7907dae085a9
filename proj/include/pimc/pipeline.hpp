// SPDX-License-Identifier: Apache-2.0
#pragma once

// One verification query end to end: encoding, goal, SMT-LIB script, solver,
// witness extraction and validation, and the answer to the property.
//
// Existential questions hold when the query is sat. Universal ones are asked
// through the negated goal: unsat means the property holds, and a sat model
// is a counterexample.

#include "encoder.hpp"
#include "errors.hpp"
#include "smtlib.hpp"
#include "solver.hpp"
#include "witness.hpp"

#include <chrono>
#include <optional>
#include <string>

namespace pimc
{

enum class problem_kind { consistency, reach_exists, reach_forall, quant_exists, quant_forall };

inline const char* to_string( problem_kind k )
{
    switch ( k ) {
    case problem_kind::consistency:
        return "consistency";
    case problem_kind::reach_exists:
        return "reach-exists";
    case problem_kind::reach_forall:
        return "reach-forall";
    case problem_kind::quant_exists:
        return "quant-exists";
    case problem_kind::quant_forall:
        return "quant-forall";
    }
    return "?";
}

struct check_problem
{
    problem_kind kind = problem_kind::consistency;
    label target;
    cmp_op op = cmp_op::ge;
    rational bound;

    [[nodiscard]] bool universal() const
    {
        return kind == problem_kind::reach_forall || kind == problem_kind::quant_forall;
    }
};

struct check_options
{
    encoder_options encoder;
    solver_config solver;
    bool emit_only = false;
};

// Process exit codes.
enum exit_code : int {
    exit_holds = 0,
    exit_fails = 1,
    exit_unknown = 2,
    exit_usage = 3,
    exit_solver = 4,
    exit_invalid = 5,
};

struct check_report
{
    check_problem problem;
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t params = 0;
    encoding_kind encoding = encoding_kind::consistency;
    std::size_t variables = 0;
    std::size_t constraints = 0;
    std::size_t assertions = 0;
    std::string script;
    std::optional< goal > query_goal; // the goal added to the encoding
    std::optional< verdict > result;
    std::optional< witness > wit;
    std::optional< validation_report > validation;
    std::optional< bool > holds;
    std::string explanation;
    double encode_seconds = 0;
    double solve_seconds = 0;
    double validate_seconds = 0;
    int exit = exit_unknown;
};

// The encoding and goal a problem is asked with.
inline encoding build_query( const param_imc& p, const check_problem& q, const encoder_options& opt,
                             std::optional< goal >& added )
{
    added.reset();
    switch ( q.kind ) {
    case problem_kind::consistency:
        return encode_consistency( p, opt );
    case problem_kind::reach_exists:
    case problem_kind::reach_forall: {
        auto e = encode_qual_reach( p, opt );
        added = q.kind == problem_kind::reach_exists ? goal::exists_reach( q.target ) : goal::none_reach( q.target );
        add_goal( e, *added );
        return e;
    }
    case problem_kind::quant_exists:
    case problem_kind::quant_forall: {
        auto e = encode_quant_reach( p, q.target, opt );
        added = q.kind == problem_kind::quant_exists ? goal::prob( q.target, q.op, q.bound )
                                                     : goal::prob_negated( q.target, q.op, q.bound );
        add_goal( e, *added );
        return e;
    }
    }
    throw error( "unknown problem" );
}

inline check_report run_check( const param_imc& p, const check_problem& q, const check_options& opt )
{
    using clock = std::chrono::steady_clock;
    auto seconds = []( clock::time_point a ) { return std::chrono::duration< double >( clock::now() - a ).count(); };

    check_report r;
    r.problem = q;
    r.states = p.state_count();
    r.transitions = p.transition_count();
    r.params = p.params().size();

    auto t0 = clock::now();
    auto e = build_query( p, q, opt.encoder, r.query_goal );
    auto script = emit_smtlib( e.problem );
    r.encode_seconds = seconds( t0 );
    r.encoding = e.kind;
    r.variables = e.problem.vars().size();
    r.constraints = e.problem.constraints().size();
    r.assertions = script.assertions;
    r.script = std::move( script.text );

    if ( opt.emit_only ) {
        r.explanation = "script emitted, solver not run";
        r.exit = exit_holds;
        return r;
    }

    smt_script s{ r.script, 0, r.assertions };
    r.result = run_solver( s, opt.solver );
    r.solve_seconds = r.result->seconds;
    const verdict& v = *r.result;

    switch ( v.status ) {
    case solver_status::unknown:
    case solver_status::timeout:
        r.explanation = std::string( "solver answered " ) + to_string( v.status );
        r.exit = exit_unknown;
        return r;
    case solver_status::solver_error:
        r.explanation = "solver error: " + v.message;
        r.exit = exit_solver;
        return r;
    case solver_status::unsat:
        r.holds = q.universal();
        r.explanation = q.universal() ? "the negated property is unsatisfiable, so the property holds"
                                      : "no implementation satisfies the query";
        r.exit = *r.holds ? exit_holds : exit_fails;
        return r;
    case solver_status::sat:
        break;
    }

    auto t1 = clock::now();
    if ( auto bad = check_model( e.problem, v ) ) {
        r.validate_seconds = seconds( t1 );
        r.explanation = "invalid model: " + *bad;
        r.exit = exit_invalid;
        return r;
    }
    try {
        r.wit = extract_witness( v, p );
    } catch ( const error& ex ) {
        r.validate_seconds = seconds( t1 );
        r.explanation = std::string( "witness extraction failed: " ) + ex.what();
        r.exit = exit_invalid;
        return r;
    }
    r.validation = validate_witness( *r.wit, p, r.query_goal, opt.encoder.match );
    r.validate_seconds = seconds( t1 );
    if ( !r.validation->ok() ) {
        r.explanation = "witness failed validation: " + r.validation->violations.front().kind + ": "
                        + r.validation->violations.front().detail;
        r.exit = exit_invalid;
        return r;
    }
    r.holds = !q.universal();
    r.explanation = q.universal() ? "the negated property is satisfiable; the witness is a counterexample"
                                  : "satisfiable; the witness is an implementation meeting the query";
    r.exit = *r.holds ? exit_holds : exit_fails;
    return r;
}

} // namespace pimc
