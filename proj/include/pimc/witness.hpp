// SPDX-License-Identifier: Apache-2.0
#pragma once

// Witness extraction from a solver model, and an exact re-check of the
// witness against the pIMC and the goal.

#include "encoder.hpp"
#include "errors.hpp"
#include "mc_engine.hpp"
#include "model.hpp"
#include "solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pimc
{

struct witness
{
    valuation values;
    mc chain;                          // over the states with rho true
    std::vector< state_index > origin; // pIMC index of each chain state
    std::optional< rational > pi_initial;
    bool approximate = false;
};

// Tolerance used when model values are approximations of algebraic numbers.
inline rational approximation_tolerance() { return rational( 1, 1000000 ); }

inline witness extract_witness( const verdict& v, const param_imc& p )
{
    if ( v.status != solver_status::sat )
        throw error( "no model to extract: verdict is " + std::string( to_string( v.status ) ) );
    auto number = [ & ]( const std::string& name ) -> const rational& {
        auto it = v.model.find( name );
        if ( it == v.model.end() || it->second.is_bool )
            throw error( "model misses variable " + name );
        return it->second.number;
    };
    auto boolean = [ & ]( const std::string& name ) {
        auto it = v.model.find( name );
        if ( it == v.model.end() || !it->second.is_bool )
            throw error( "model misses variable " + name );
        return it->second.boolean;
    };

    witness w;
    w.approximate = v.approximate;
    for ( const auto& y : p.params() )
        w.values[ y ] = number( param_var( y ) );

    std::map< state_index, state_index > renumber;
    for ( state_index s = 0; s < p.state_count(); ++s )
        if ( boolean( rho_var( s ) ) ) {
            renumber[ s ] = w.origin.size();
            w.origin.push_back( s );
        }
    if ( !renumber.count( p.initial() ) )
        throw error( "model drops the initial state" );

    std::vector< std::string > names;
    std::vector< label > labels;
    std::vector< mc::row_type > rows( w.origin.size() );
    for ( auto s : w.origin ) {
        names.push_back( p.name( s ) );
        labels.push_back( p.labels_of( s ) );
        rational sum( 0 );
        for ( auto d : succ( p, s ) ) {
            const rational& x = number( theta_var( s, d ) );
            if ( x == 0 )
                continue;
            auto it = renumber.find( d );
            if ( it == renumber.end() )
                throw error( "model moves mass from " + p.name( s ) + " to the dropped state " + p.name( d ) );
            rows[ renumber[ s ] ][ it->second ] = x;
            sum += x;
        }
        if ( !w.approximate && sum != 1 )
            throw error( "row of " + p.name( s ) + " sums to " + to_string( sum ) );
    }
    w.chain = mc( std::move( names ), std::move( labels ), renumber[ p.initial() ], std::move( rows ) );
    if ( auto it = v.model.find( pi_var( p.initial() ) ); it != v.model.end() && !it->second.is_bool )
        w.pi_initial = it->second.number;
    return w;
}

struct violation
{
    std::string kind; // row, interval, structure, bound, equation
    std::string detail;
};

struct validation_report
{
    std::vector< violation > violations;
    std::optional< rational > reach; // reachability probability of the goal target
    bool approximate = false;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

// Exact re-check: distributions, interval membership of every kept row
// against the full pIMC row (dropped or absent states count as 0), labels and
// initial state, and the goal on the computed reachability probability.
// A nonzero tolerance widens every comparison by that amount.
inline validation_report validate_witness( const mc& m, const valuation& val, const param_imc& p,
                                           const std::optional< goal >& g, const rational& tol = 0,
                                           label_match mode = label_match::exact )
{
    validation_report r;
    r.approximate = tol != 0;
    auto add = [ & ]( const char* kind, std::string detail ) { r.violations.push_back( { kind, std::move( detail ) } ); };

    try {
        check_valuation( p, val );
    } catch ( const error& e ) {
        add( "structure", e.what() );
        return r;
    }
    for ( const auto& [ y, x ] : val )
        if ( x < 0 || x > 1 )
            add( "interval", "parameter " + y + " = " + to_string( x ) + " outside [0, 1]" );

    std::vector< std::optional< state_index > > origin( m.state_count() );
    for ( state_index s = 0; s < m.state_count(); ++s ) {
        auto o = p.find_state( m.name( s ) );
        if ( !o ) {
            add( "structure", "state " + m.name( s ) + " is not in the pIMC" );
            continue;
        }
        origin[ s ] = *o;
        if ( m.labels_of( s ) != p.labels_of( *o ) )
            add( "structure", "labels of " + m.name( s ) + " differ" );
    }
    if ( !origin[ m.initial() ] || *origin[ m.initial() ] != p.initial() )
        add( "structure", "initial state differs" );
    if ( !r.ok() )
        return r;

    for ( state_index s = 0; s < m.state_count(); ++s ) {
        rational sum( 0 );
        for ( const auto& [ _, x ] : m.row( s ) ) {
            sum += x;
            if ( x < 0 || x > 1 )
                add( "row", "p(" + m.name( s ) + ") has entry " + to_string( x ) );
        }
        if ( abs( sum - 1 ) > tol )
            add( "row", "row of " + m.name( s ) + " sums to " + to_string( sum ) );

        std::map< state_index, rational > full;
        for ( const auto& [ d, x ] : m.row( s ) )
            full[ *origin[ d ] ] = x;
        for ( const auto& [ d, _ ] : p.row( *origin[ s ] ) )
            full.emplace( d, rational( 0 ) );
        for ( const auto& [ d, x ] : full ) {
            const std::string where = m.name( s ) + " -> " + p.name( d );
            const auto* iv = p.find( *origin[ s ], d );
            if ( !iv ) {
                if ( x != 0 )
                    add( "structure", where + " has no interval but probability " + to_string( x ) );
                continue;
            }
            rational lo, hi;
            try {
                lo = iv->lo.evaluate( val );
                hi = iv->hi.evaluate( val );
            } catch ( const division_by_zero& ) {
                add( "interval", where + ": endpoint divides by zero" );
                continue;
            }
            if ( lo < -tol || hi > 1 + tol || lo > hi + tol )
                add( "interval", where + ": interval [" + to_string( lo ) + ", " + to_string( hi ) + "] is empty" );
            else if ( x < lo - tol || x > hi + tol )
                add( "interval", where + ": " + to_string( x ) + " outside [" + to_string( lo ) + ", " + to_string( hi ) + "]" );
        }
    }
    if ( !r.ok() || !g )
        return r;

    const state_set target = states_with_label( m, g->target, mode );
    const rational reach = reach_prob( m, m.initial(), target );
    r.reach = reach;
    const std::string shown = "reachability probability " + to_string( reach );
    switch ( g->kind ) {
    case goal_kind::exists_reach:
        if ( reach == 0 )
            add( "bound", shown + ", expected positive" );
        break;
    case goal_kind::none_reach:
        if ( reach != 0 )
            add( "bound", shown + ", expected 0" );
        break;
    case goal_kind::prob_bound:
    case goal_kind::prob_bound_negated: {
        bool ok;
        if ( g->kind == goal_kind::prob_bound_negated && g->op == cmp_op::eq )
            ok = abs( reach - g->bound ) > 0 || tol != 0;
        else {
            cmp_op op = g->kind == goal_kind::prob_bound ? g->op : negate( g->op );
            ok = holds( op, reach, g->bound ) || ( tol != 0 && abs( reach - g->bound ) <= tol );
        }
        if ( !ok )
            add( "bound", shown + " violates the goal" );
        break;
    }
    }
    return r;
}

// Also compares the solver's pi for the initial state with the exact
// reachability probability of the extracted chain.
inline validation_report validate_witness( const witness& w, const param_imc& p, const std::optional< goal >& g,
                                           label_match mode = label_match::exact )
{
    const rational tol = w.approximate ? approximation_tolerance() : rational( 0 );
    auto r = validate_witness( w.chain, w.values, p, g, tol, mode );
    const bool quantitative = g && ( g->kind == goal_kind::prob_bound || g->kind == goal_kind::prob_bound_negated );
    if ( r.ok() && quantitative && r.reach && w.pi_initial && abs( *r.reach - *w.pi_initial ) > tol )
        r.violations.push_back( { "equation", "solver reports pi = " + to_string( *w.pi_initial )
                                                  + " but the witness reaches the target with probability "
                                                  + to_string( *r.reach ) } );
    return r;
}

} // namespace pimc
