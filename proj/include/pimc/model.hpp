// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "errors.hpp"
#include "expr.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace pimc
{

using state_index = std::size_t;
using state_set = std::set< state_index >;

// Set of atomic propositions attached to a state.
using label = std::set< std::string >;

inline std::string to_string( const label& l )
{
    std::string out = "{";
    for ( const auto& p : l ) {
        if ( out.size() > 1 )
            out += ",";
        out += p;
    }
    return out + "}";
}

// Constant probability interval. `empty` is the inconsistent interval and is
// distinct from [0,0]: a [0,0] transition admits probability 0, an empty one
// admits nothing.
struct interval
{
    rational lo;
    rational hi;
    bool empty = false;

    static interval point( const rational& x ) { return closed( x, x ); }

    // Applies the consistency rule: [lo,hi] if 0 <= lo <= hi <= 1, else empty.
    static interval closed( const rational& lo, const rational& hi )
    {
        if ( lo < 0 || lo > hi || hi > 1 )
            return empty_set();
        return interval{ lo, hi, false };
    }

    static interval empty_set() { return interval{ rational( 1 ), rational( 0 ), true }; }

    [[nodiscard]] bool contains( const rational& x ) const { return !empty && lo <= x && x <= hi; }
    [[nodiscard]] bool is_zero() const { return !empty && lo == 0 && hi == 0; }

    friend bool operator==( const interval& a, const interval& b )
    {
        if ( a.empty || b.empty )
            return a.empty == b.empty;
        return a.lo == b.lo && a.hi == b.hi;
    }
};

struct param_interval
{
    param_expr lo;
    param_expr hi;

    // Throws division_by_zero when an endpoint is undefined.
    [[nodiscard]] interval instantiate( const valuation& v ) const
    {
        return interval::closed( lo.evaluate( v ), hi.evaluate( v ) );
    }

    // Syntactic [0,0]: both endpoints are parameter-free and evaluate to 0.
    [[nodiscard]] bool is_zero_literal() const
    {
        auto a = lo.constant_value();
        auto b = hi.constant_value();
        return a && b && *a == 0 && *b == 0;
    }

    friend bool operator==( const param_interval& a, const param_interval& b )
    {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

// A transition is potential when it is neither absent nor identically zero.
inline bool is_potential( const rational& p ) { return p != 0; }
inline bool is_potential( const interval& i ) { return !i.empty && !i.is_zero(); }
inline bool is_potential( const param_interval& i ) { return !i.is_zero_literal(); }

template < typename Payload >
class chain
{
public:
    using payload_type = Payload;
    using row_type = std::map< state_index, Payload >;

private:
    std::vector< std::string > _names;
    std::vector< label > _labels;
    state_index _initial = 0;
    std::vector< row_type > _rows;

public:
    chain() = default;

    chain( std::vector< std::string > names, std::vector< label > labels, state_index initial,
           std::vector< row_type > rows )
        : _names{ std::move( names ) }, _labels{ std::move( labels ) }, _initial{ initial },
          _rows{ std::move( rows ) }
    {
        if ( _names.empty() )
            throw error( "a chain needs at least one state" );
        if ( _labels.size() != _names.size() || _rows.size() != _names.size() )
            throw error( "state, label and row counts differ" );
        if ( _initial >= _names.size() )
            throw error( "initial state out of range" );
        for ( const auto& row : _rows )
            for ( const auto& [ dst, _ ] : row )
                if ( dst >= _names.size() )
                    throw error( "transition target out of range" );
    }

    [[nodiscard]] std::size_t state_count() const { return _names.size(); }
    [[nodiscard]] state_index initial() const { return _initial; }
    [[nodiscard]] const std::vector< std::string >& names() const { return _names; }
    [[nodiscard]] const std::string& name( state_index s ) const { return _names.at( s ); }
    [[nodiscard]] const std::vector< label >& labels() const { return _labels; }
    [[nodiscard]] const label& labels_of( state_index s ) const { return _labels.at( s ); }
    [[nodiscard]] const std::vector< row_type >& rows() const { return _rows; }
    [[nodiscard]] const row_type& row( state_index s ) const { return _rows.at( s ); }

    [[nodiscard]] const Payload* find( state_index src, state_index dst ) const
    {
        const auto& r = _rows.at( src );
        auto it = r.find( dst );
        return it == r.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::optional< state_index > find_state( const std::string& n ) const
    {
        for ( state_index i = 0; i < _names.size(); ++i )
            if ( _names[ i ] == n )
                return i;
        return std::nullopt;
    }

    [[nodiscard]] state_index index_of( const std::string& n ) const
    {
        if ( auto i = find_state( n ) )
            return *i;
        throw error( "unknown state " + n );
    }

    void check_state( state_index s ) const
    {
        if ( s >= _names.size() )
            throw error( "unknown state index " + std::to_string( s ) );
    }

    [[nodiscard]] std::size_t transition_count() const
    {
        std::size_t n = 0;
        for ( const auto& r : _rows )
            for ( const auto& [ _, p ] : r )
                if ( is_potential( p ) )
                    ++n;
        return n;
    }

    // States plus transitions not reduced to zero.
    [[nodiscard]] std::size_t size() const { return state_count() + transition_count(); }

    friend bool operator==( const chain& a, const chain& b ) = default;
};

// Exact-rational Markov chain.
using mc = chain< rational >;
// Interval Markov chain with constant endpoints.
using imc = chain< interval >;

class param_imc : public chain< param_interval >
{
    std::set< std::string > _params;

public:
    param_imc() = default;

    param_imc( std::vector< std::string > names, std::vector< label > labels, state_index initial,
               std::vector< row_type > rows, std::set< std::string > params )
        : chain( std::move( names ), std::move( labels ), initial, std::move( rows ) ),
          _params{ std::move( params ) }
    {
        for ( const auto& r : this->rows() )
            for ( const auto& [ _, i ] : r ) {
                std::set< std::string > used;
                i.lo.collect_parameters( used );
                i.hi.collect_parameters( used );
                for ( const auto& p : used )
                    if ( !_params.count( p ) )
                        throw error( "undeclared parameter " + p );
            }
    }

    [[nodiscard]] const std::set< std::string >& params() const { return _params; }

    friend bool operator==( const param_imc& a, const param_imc& b )
    {
        return a._params == b._params
               && static_cast< const chain< param_interval >& >( a ) == static_cast< const chain< param_interval >& >( b );
    }
};

// Incremental construction; the built chain is immutable.
template < typename Payload >
class chain_builder
{
    std::vector< std::string > _names;
    std::vector< label > _labels;
    std::optional< state_index > _initial;
    std::vector< typename chain< Payload >::row_type > _rows;
    std::set< std::string > _params;

public:
    chain_builder& state( const std::string& name, label l = {} )
    {
        _names.push_back( name );
        _labels.push_back( std::move( l ) );
        _rows.emplace_back();
        return *this;
    }

    chain_builder& initial( const std::string& name )
    {
        _initial = index( name );
        return *this;
    }

    chain_builder& edge( const std::string& src, const std::string& dst, Payload p )
    {
        _rows.at( index( src ) )[ index( dst ) ] = std::move( p );
        return *this;
    }

    chain_builder& param( const std::string& name )
    {
        _params.insert( name );
        return *this;
    }

    [[nodiscard]] state_index index( const std::string& name ) const
    {
        auto it = std::find( _names.begin(), _names.end(), name );
        if ( it == _names.end() )
            throw error( "unknown state " + name );
        return static_cast< state_index >( it - _names.begin() );
    }

    [[nodiscard]] auto build() const
    {
        state_index init = _initial.value_or( 0 );
        if constexpr ( std::is_same_v< Payload, param_interval > )
            return param_imc( _names, _labels, init, _rows, _params );
        else
            return chain< Payload >( _names, _labels, init, _rows );
    }
};

template < typename Payload >
state_set succ( const chain< Payload >& m, state_index s )
{
    m.check_state( s );
    state_set out;
    for ( const auto& [ dst, p ] : m.row( s ) )
        if ( is_potential( p ) )
            out.insert( dst );
    return out;
}

template < typename Payload >
state_set pred( const chain< Payload >& m, state_index s )
{
    m.check_state( s );
    state_set out;
    for ( state_index src = 0; src < m.state_count(); ++src )
        if ( const auto* p = m.find( src, s ); p && is_potential( *p ) )
            out.insert( src );
    return out;
}

// All predecessor sets at once; pred() is quadratic when called per state.
template < typename Payload >
std::vector< state_set > pred_sets( const chain< Payload >& m )
{
    std::vector< state_set > out( m.state_count() );
    for ( state_index src = 0; src < m.state_count(); ++src )
        for ( const auto& [ dst, p ] : m.row( src ) )
            if ( is_potential( p ) )
                out[ dst ].insert( src );
    return out;
}

// Graph reachability over potential transitions.
template < typename Payload >
state_set reachable_from( const chain< Payload >& m, state_index from )
{
    m.check_state( from );
    state_set seen{ from };
    std::deque< state_index > work{ from };
    while ( !work.empty() ) {
        auto s = work.front();
        work.pop_front();
        for ( const auto& [ dst, p ] : m.row( s ) )
            if ( is_potential( p ) && seen.insert( dst ).second )
                work.push_back( dst );
    }
    return seen;
}

enum class label_match { exact, subset };

inline bool matches( const label& state_label, const label& target, label_match mode )
{
    if ( mode == label_match::exact )
        return state_label == target;
    return std::includes( state_label.begin(), state_label.end(), target.begin(), target.end() );
}

template < typename Payload >
state_set states_with_label( const chain< Payload >& m, const label& target, label_match mode = label_match::exact )
{
    state_set out;
    for ( state_index s = 0; s < m.state_count(); ++s )
        if ( matches( m.labels_of( s ), target, mode ) )
            out.insert( s );
    return out;
}

inline void check_valuation( const param_imc& p, const valuation& v )
{
    for ( const auto& name : p.params() )
        if ( !v.count( name ) )
            throw error( "valuation misses parameter " + name );
    for ( const auto& [ name, _ ] : v )
        if ( !p.params().count( name ) )
            throw error( "valuation names undeclared parameter " + name );
}

inline imc instantiate( const param_imc& p, const valuation& v )
{
    check_valuation( p, v );
    std::vector< imc::row_type > rows( p.state_count() );
    for ( state_index s = 0; s < p.state_count(); ++s )
        for ( const auto& [ dst, i ] : p.row( s ) ) {
            try {
                rows[ s ][ dst ] = i.instantiate( v );
            } catch ( const division_by_zero& e ) {
                throw division_by_zero( "transition " + p.name( s ) + " -> " + p.name( dst ) + ": " + e.what() );
            }
        }
    return imc( p.names(), p.labels(), p.initial(), std::move( rows ) );
}

struct row_violation
{
    state_index state;
    rational row_sum;
    bool has_negative = false;
    bool has_above_one = false;
};

struct mc_report
{
    std::vector< row_violation > violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

inline mc_report validate_mc( const mc& m )
{
    mc_report report;
    for ( state_index s = 0; s < m.state_count(); ++s ) {
        row_violation v{ s, rational( 0 ) };
        for ( const auto& [ _, p ] : m.row( s ) ) {
            v.row_sum += p;
            v.has_negative |= p < 0;
            v.has_above_one |= p > 1;
        }
        if ( v.row_sum != 1 || v.has_negative || v.has_above_one )
            report.violations.push_back( v );
    }
    return report;
}

// Point-interval IMC of an MC.
inline imc to_imc( const mc& m )
{
    std::vector< imc::row_type > rows( m.state_count() );
    for ( state_index s = 0; s < m.state_count(); ++s )
        for ( const auto& [ dst, p ] : m.row( s ) )
            rows[ s ][ dst ] = interval::point( p );
    return imc( m.names(), m.labels(), m.initial(), std::move( rows ) );
}

inline param_imc to_param_imc( const imc& m )
{
    std::vector< param_imc::row_type > rows( m.state_count() );
    for ( state_index s = 0; s < m.state_count(); ++s )
        for ( const auto& [ dst, i ] : m.row( s ) ) {
            if ( i.empty )
                rows[ s ][ dst ] = param_interval{ rational( 1 ), rational( 0 ) };
            else
                rows[ s ][ dst ] = param_interval{ i.lo, i.hi };
        }
    return param_imc( m.names(), m.labels(), m.initial(), std::move( rows ), {} );
}

inline param_imc to_param_imc( const mc& m ) { return to_param_imc( to_imc( m ) ); }

// Sub-chain over `kept` (renumbered in ascending order); transitions leaving
// the kept set are dropped. The initial state must be kept.
template < typename Payload >
chain< Payload > restrict_to( const chain< Payload >& m, const state_set& kept )
{
    if ( !kept.count( m.initial() ) )
        throw error( "restriction drops the initial state" );
    std::map< state_index, state_index > renumber;
    std::vector< std::string > names;
    std::vector< label > labels;
    for ( auto s : kept ) {
        m.check_state( s );
        renumber[ s ] = names.size();
        names.push_back( m.name( s ) );
        labels.push_back( m.labels_of( s ) );
    }
    std::vector< typename chain< Payload >::row_type > rows( kept.size() );
    for ( auto s : kept )
        for ( const auto& [ dst, p ] : m.row( s ) )
            if ( auto it = renumber.find( dst ); it != renumber.end() )
                rows[ renumber[ s ] ][ it->second ] = p;
    return chain< Payload >( std::move( names ), std::move( labels ), renumber[ m.initial() ], std::move( rows ) );
}

} // namespace pimc
