// SPDX-License-Identifier: Apache-2.0
#pragma once

// The four constraint encodings of a pIMC (consistency, qualitative
// reachability, co-reachability markers, quantitative reachability) and goal
// injection.
//
// Variable names: theta_<s>_<d>, rho_<s>, omega_<s>, lambda_<s>, alpha_<s>,
// pi_<s> with state indices, and param_<name> for parameters.

#include "csp.hpp"
#include "errors.hpp"
#include "mc_engine.hpp"
#include "model.hpp"

#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace pimc
{

inline std::string theta_var( state_index s, state_index d )
{
    return "theta_" + std::to_string( s ) + "_" + std::to_string( d );
}
inline std::string rho_var( state_index s ) { return "rho_" + std::to_string( s ); }
inline std::string omega_var( state_index s ) { return "omega_" + std::to_string( s ); }
inline std::string lambda_var( state_index s ) { return "lambda_" + std::to_string( s ); }
inline std::string alpha_var( state_index s ) { return "alpha_" + std::to_string( s ); }
inline std::string pi_var( state_index s ) { return "pi_" + std::to_string( s ); }

enum class encoding_kind { consistency, qual_reach, reach_aux, quant_reach };

inline const char* to_string( encoding_kind k )
{
    switch ( k ) {
    case encoding_kind::consistency:
        return "consistency";
    case encoding_kind::qual_reach:
        return "qual-reach";
    case encoding_kind::reach_aux:
        return "reach-aux";
    case encoding_kind::quant_reach:
        return "quant-reach";
    }
    return "?";
}

struct encoder_options
{
    // (3) is entailed by (8) and (10) once the reachability counters exist;
    // dropping it only affects the reachability encodings.
    bool keep_constraint_3 = true;
    label_match match = label_match::exact;
};

struct encoding
{
    csp problem;
    encoding_kind kind = encoding_kind::consistency;
    std::size_t states = 0;
    state_index initial = 0;
    std::vector< label > labels;
    std::optional< label > target;
    state_set target_states;
    encoder_options options;
};

namespace detail
{

inline term theta( state_index s, state_index d ) { return term::var( theta_var( s, d ) ); }

inline std::string state_source( const param_imc& p, state_index s ) { return "state " + p.name( s ); }

inline std::string edge_source( const param_imc& p, state_index s, state_index d )
{
    return p.name( s ) + " -> " + p.name( d );
}

inline void add_consistency( encoding& e, const param_imc& p, bool keep3 )
{
    csp& c = e.problem;
    for ( const auto& y : p.params() )
        c.declare( param_var( y ), var_sort::real, 0, 1 );
    for ( state_index s = 0; s < p.state_count(); ++s )
        for ( auto d : succ( p, s ) )
            c.declare( theta_var( s, d ), var_sort::real, 0, 1 );
    for ( state_index s = 0; s < p.state_count(); ++s )
        c.declare( rho_var( s ), var_sort::boolean );

    const auto preds = pred_sets( p );
    for ( state_index s = 0; s < p.state_count(); ++s ) {
        const auto src = state_source( p, s );
        const formula rho = formula::bvar( rho_var( s ) );
        std::vector< term > out;
        for ( auto d : succ( p, s ) )
            out.push_back( theta( s, d ) );
        const term out_sum = term::sum( out );

        if ( s == p.initial() )
            c.add( rho, 1, src );
        c.add( formula::iff( rho, eq( out_sum, 1 ) ), 2, src );
        if ( s != p.initial() && keep3 ) {
            std::vector< term > in;
            for ( auto q : preds[ s ] )
                if ( q != s )
                    in.push_back( theta( q, s ) );
            c.add( formula::iff( !rho, eq( term::sum( in ), 0 ) ), 3, src );
        }
        c.add( formula::iff( !rho, eq( out_sum, 0 ) ), 4, src );
        for ( auto d : succ( p, s ) ) {
            const auto& iv = *p.find( s, d );
            term lo = to_term( iv.lo ), hi = to_term( iv.hi ), th = theta( s, d );
            c.add( formula::implies( rho, formula::conj( { le( lo, th ), le( th, hi ), le( 0, lo ), le( hi, 1 ) } ) ), 5,
                   edge_source( p, s, d ) );
        }
    }
}

inline void add_qual_reach( encoding& e, const param_imc& p )
{
    csp& c = e.problem;
    const rational n( static_cast< long >( p.state_count() ) );
    for ( state_index s = 0; s < p.state_count(); ++s )
        c.declare( omega_var( s ), var_sort::counter, 0, n );

    const auto preds = pred_sets( p );
    for ( state_index s = 0; s < p.state_count(); ++s ) {
        const auto src = state_source( p, s );
        const term w = term::var( omega_var( s ) );
        if ( s == p.initial() )
            c.add( eq( w, 1 ), 6, src );
        else
            c.add( ne( w, 1 ), 7, src );
        c.add( formula::iff( formula::bvar( rho_var( s ) ), ne( w, 0 ) ), 8, src );
        if ( s == p.initial() )
            continue;
        std::vector< formula > some, none;
        for ( auto q : preds[ s ] ) {
            if ( q == s )
                continue;
            const term wq = term::var( omega_var( q ) );
            some.push_back( eq( w, wq + term( 1 ) ) && gt( theta( q, s ), 0 ) );
            none.push_back( eq( wq, 0 ) || eq( theta( q, s ), 0 ) );
        }
        c.add( formula::implies( gt( w, 1 ), formula::disj( some ) ), 9, src );
        c.add( formula::iff( eq( w, 0 ), formula::conj( none ) ), 10, src );
    }
}

inline void add_reach_aux( encoding& e, const param_imc& p )
{
    csp& c = e.problem;
    const rational n( static_cast< long >( p.state_count() ) );
    for ( state_index s = 0; s < p.state_count(); ++s )
        c.declare( lambda_var( s ), var_sort::boolean );
    for ( state_index s = 0; s < p.state_count(); ++s )
        c.declare( alpha_var( s ), var_sort::counter, 0, n );

    for ( state_index s = 0; s < p.state_count(); ++s ) {
        const auto src = state_source( p, s );
        const term a = term::var( alpha_var( s ) );
        const bool is_target = e.target_states.count( s ) != 0;
        if ( is_target )
            c.add( eq( a, 1 ), 11, src );
        else
            c.add( ne( a, 1 ), 12, src );
        c.add( formula::iff( formula::bvar( lambda_var( s ) ), formula::bvar( rho_var( s ) ) && ne( a, 0 ) ), 13, src );
        if ( is_target )
            continue;
        std::vector< formula > some, none;
        for ( auto d : succ( p, s ) ) {
            if ( d == s )
                continue;
            const term ad = term::var( alpha_var( d ) );
            some.push_back( eq( a, ad + term( 1 ) ) && gt( theta( s, d ), 0 ) );
            none.push_back( eq( ad, 0 ) || eq( theta( s, d ), 0 ) );
        }
        c.add( formula::implies( gt( a, 1 ), formula::disj( some ) ), 14, src );
        c.add( formula::iff( eq( a, 0 ), formula::conj( none ) ), 15, src );
    }
}

inline void add_quant_reach( encoding& e, const param_imc& p )
{
    csp& c = e.problem;
    for ( state_index s = 0; s < p.state_count(); ++s )
        c.declare( pi_var( s ), var_sort::real, 0, 1 );

    for ( state_index s = 0; s < p.state_count(); ++s ) {
        const auto src = state_source( p, s );
        const formula lambda = formula::bvar( lambda_var( s ) );
        const term pi = term::var( pi_var( s ) );
        c.add( formula::implies( !lambda, eq( pi, 0 ) ), 16, src );
        if ( e.target_states.count( s ) ) {
            c.add( formula::implies( lambda, eq( pi, 1 ) ), 17, src );
        } else {
            std::vector< term > flow;
            for ( auto d : succ( p, s ) )
                flow.push_back( term::var( pi_var( d ) ) * theta( s, d ) );
            c.add( formula::implies( lambda, eq( pi, term::sum( flow ) ) ), 18, src );
        }
    }
}

inline encoding start( const param_imc& p, encoding_kind kind, const encoder_options& opt,
                       const std::optional< label >& target )
{
    encoding e;
    e.kind = kind;
    e.states = p.state_count();
    e.initial = p.initial();
    e.labels = p.labels();
    e.options = opt;
    e.target = target;
    if ( target )
        e.target_states = states_with_label( p, *target, opt.match );
    return e;
}

} // namespace detail

// Constraints (1)-(5); (3) is always present here.
inline encoding encode_consistency( const param_imc& p, const encoder_options& opt = {} )
{
    auto e = detail::start( p, encoding_kind::consistency, opt, std::nullopt );
    detail::add_consistency( e, p, true );
    return e;
}

// Adds the counters omega and constraints (6)-(10).
inline encoding encode_qual_reach( const param_imc& p, const encoder_options& opt = {} )
{
    auto e = detail::start( p, encoding_kind::qual_reach, opt, std::nullopt );
    detail::add_consistency( e, p, opt.keep_constraint_3 );
    detail::add_qual_reach( e, p );
    return e;
}

// Adds lambda, the counters alpha and constraints (11)-(15).
inline encoding encode_reach_aux( const param_imc& p, const label& target, const encoder_options& opt = {} )
{
    auto e = detail::start( p, encoding_kind::reach_aux, opt, target );
    detail::add_consistency( e, p, opt.keep_constraint_3 );
    detail::add_qual_reach( e, p );
    detail::add_reach_aux( e, p );
    return e;
}

// Adds pi and constraints (16)-(18).
inline encoding encode_quant_reach( const param_imc& p, const label& target, const encoder_options& opt = {} )
{
    auto e = detail::start( p, encoding_kind::quant_reach, opt, target );
    detail::add_consistency( e, p, opt.keep_constraint_3 );
    detail::add_qual_reach( e, p );
    detail::add_reach_aux( e, p );
    detail::add_quant_reach( e, p );
    return e;
}

// Number of constraints of encode_consistency: (1) once, (2) and (4) per
// state, (3) per non-initial state, (5) per transition.
inline std::size_t consistency_constraint_count( const param_imc& p )
{
    std::size_t transitions = 0;
    for ( state_index s = 0; s < p.state_count(); ++s )
        transitions += succ( p, s ).size();
    return 3 * p.state_count() + transitions;
}

enum class goal_kind { exists_reach, none_reach, prob_bound, prob_bound_negated };

struct goal
{
    goal_kind kind = goal_kind::exists_reach;
    label target;
    cmp_op op = cmp_op::ge;
    rational bound;

    static goal exists_reach( label a ) { return { goal_kind::exists_reach, std::move( a ), cmp_op::ge, 0 }; }
    static goal none_reach( label a ) { return { goal_kind::none_reach, std::move( a ), cmp_op::ge, 0 }; }
    static goal prob( label a, cmp_op op, rational p ) { return { goal_kind::prob_bound, std::move( a ), op, std::move( p ) }; }
    static goal prob_negated( label a, cmp_op op, rational p )
    {
        return { goal_kind::prob_bound_negated, std::move( a ), op, std::move( p ) };
    }
};

// The comparison a witness must satisfy for a probability goal.
inline formula goal_comparison( const goal& g, term value )
{
    if ( g.kind == goal_kind::prob_bound )
        return formula::compare( std::move( value ), g.op, g.bound );
    if ( g.op == cmp_op::eq )
        return ne( std::move( value ), g.bound );
    return formula::compare( std::move( value ), negate( g.op ), g.bound );
}

// States whose label matches `a` under the encoding's matching mode.
inline state_set matching_states( const encoding& e, const label& a )
{
    state_set out;
    for ( state_index s = 0; s < e.labels.size(); ++s )
        if ( matches( e.labels[ s ], a, e.options.match ) )
            out.insert( s );
    return out;
}

inline void add_goal( encoding& e, const goal& g )
{
    switch ( g.kind ) {
    case goal_kind::exists_reach:
    case goal_kind::none_reach: {
        if ( e.kind == encoding_kind::consistency )
            throw error( "reachability goals need the qualitative reachability encoding" );
        std::vector< formula > parts;
        for ( auto s : matching_states( e, g.target ) ) {
            formula rho = formula::bvar( rho_var( s ) );
            parts.push_back( g.kind == goal_kind::exists_reach ? rho : !rho );
        }
        if ( g.kind == goal_kind::exists_reach )
            e.problem.add( formula::disj( parts ), 0, "goal" );
        else
            e.problem.add( formula::conj( parts ), 0, "goal" );
        return;
    }
    case goal_kind::prob_bound:
    case goal_kind::prob_bound_negated:
        if ( e.kind != encoding_kind::quant_reach )
            throw error( "probability goals need the quantitative reachability encoding" );
        if ( !e.target || *e.target != g.target )
            throw error( "probability goal target differs from the encoded target" );
        e.problem.add( goal_comparison( g, term::var( pi_var( e.initial ) ) ), 0, "goal" );
        return;
    }
}

// The solution an instance of p induces: theta from the reachable rows of m,
// counters as breadth-first distances plus one, pi as reachability
// probabilities. Satisfies every encoding of p when m is an instance under v.
inline assignment induced_assignment( const encoding& e, const param_imc& p, const valuation& v, const mc& m )
{
    if ( m.state_count() != p.state_count() )
        throw error( "instance and pIMC have different state counts" );
    assignment a;
    for ( const auto& y : p.params() ) {
        auto it = v.find( y );
        if ( it == v.end() )
            throw error( "valuation misses parameter " + y );
        a[ param_var( y ) ] = it->second;
    }
    const auto n = p.state_count();
    std::vector< long > omega( n, 0 ), alpha( n, 0 );
    std::deque< state_index > work{ m.initial() };
    omega[ m.initial() ] = 1;
    while ( !work.empty() ) {
        auto s = work.front();
        work.pop_front();
        for ( const auto& [ d, x ] : m.row( s ) )
            if ( x != 0 && omega[ d ] == 0 ) {
                omega[ d ] = omega[ s ] + 1;
                work.push_back( d );
            }
    }
    std::vector< state_set > back( n );
    for ( state_index s = 0; s < n; ++s )
        if ( omega[ s ] != 0 )
            for ( const auto& [ d, x ] : m.row( s ) )
                if ( x != 0 )
                    back[ d ].insert( s );
    for ( auto t : e.target_states ) {
        alpha[ t ] = 1;
        work.push_back( t );
    }
    while ( !work.empty() ) {
        auto d = work.front();
        work.pop_front();
        for ( auto s : back[ d ] )
            if ( alpha[ s ] == 0 ) {
                alpha[ s ] = alpha[ d ] + 1;
                work.push_back( s );
            }
    }
    const auto probs = reach_probabilities( m, e.target_states );
    for ( state_index s = 0; s < n; ++s ) {
        const bool rho = omega[ s ] != 0;
        for ( auto d : succ( p, s ) ) {
            const auto* x = m.find( s, d );
            a[ theta_var( s, d ) ] = rho && x ? *x : rational( 0 );
        }
        a[ rho_var( s ) ] = rho;
        a[ omega_var( s ) ] = rational( omega[ s ] );
        const bool lambda = rho && alpha[ s ] != 0;
        a[ lambda_var( s ) ] = lambda;
        a[ alpha_var( s ) ] = rational( alpha[ s ] );
        a[ pi_var( s ) ] = lambda ? probs[ s ] : rational( 0 );
    }
    for ( auto it = a.begin(); it != a.end(); )
        it = e.problem.has( it->first ) ? std::next( it ) : a.erase( it );
    return a;
}

} // namespace pimc
